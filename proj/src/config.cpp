#include "rfflow/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "rfflow/csvio.hpp"

namespace rfflow {

namespace {

std::string trim(const std::string& s) {
    auto a = s.find_first_not_of(" \t\r");
    auto b = s.find_last_not_of(" \t\r");
    if (a == std::string::npos) return "";
    return s.substr(a, b - a + 1);
}

double to_double(const std::string& v, const std::string& key) {
    try {
        std::size_t pos = 0;
        double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (std::exception&) {
        throw ConfigError("bad numeric value for " + key + ": '" + v + "'");
    }
}

int to_int(const std::string& v, const std::string& key) {
    double x = to_double(v, key);
    if (x != std::floor(x)) throw ConfigError(key + " must be an integer");
    return int(x);
}

bool to_bool(const std::string& v, const std::string& key) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError("bad boolean for " + key + ": '" + v + "'");
}

std::vector<double> to_list(const std::string& v, const std::string& key) {
    std::vector<double> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(to_double(trim(item), key));
    return out;
}

}  // namespace

ModelConfig RunConfig::model() const {
    double m, n2;
    if (activation) {
        if (mu || nu) throw ConfigError("provide either an activation name or (mu, nu), not both");
        Activation a = activation_by_name(*activation);
        auto hc = hermite_coefficients(a, a.default_nodes);
        m = hc.mu;
        n2 = hc.nu;
    } else {
        if (!mu || !nu) throw ConfigError("model section needs an activation name or both mu and nu");
        m = *mu;
        n2 = *nu;
    }
    ModelConfig cfg(m, n2, psi, phi, r, s, lambda);
    if (cfg.degenerate()) throw ConfigError("degenerate model: mu = nu = r = s = 0");
    return cfg;
}

std::vector<double> RunConfig::time_grid() const {
    if (t_count < 1) throw ConfigError("t_count must be >= 1");
    std::vector<double> ts(t_count);
    if (t_count == 1) {
        ts[0] = t_min;
        return ts;
    }
    double la = std::log(t_min), lb = std::log(t_max);
    for (int i = 0; i < t_count; ++i) ts[i] = std::exp(la + (lb - la) * i / (t_count - 1));
    return ts;
}

RunConfig parse_run_config(const std::string& text) {
    RunConfig rc;
    std::string section;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[' && line.back() == ']') {
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("bad config line: '" + line + "'");
        std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        auto is = [&](const char* s, const char* k) { return section == s && key == k; };

        if (is("model", "activation")) rc.activation = val;
        else if (is("model", "mu")) rc.mu = to_double(val, key);
        else if (is("model", "nu")) rc.nu = to_double(val, key);
        else if (is("model", "psi")) rc.psi = to_double(val, key);
        else if (is("model", "phi")) rc.phi = to_double(val, key);
        else if (is("model", "r")) rc.r = to_double(val, key);
        else if (is("model", "s")) rc.s = to_double(val, key);
        else if (is("model", "lambda")) rc.lambda = to_double(val, key);
        else if (is("numerics", "grid_points")) rc.grid_points = to_int(val, key);
        else if (is("numerics", "grid_points_2d")) rc.grid_points_2d = to_int(val, key);
        else if (is("numerics", "offset")) rc.offset = to_double(val, key);
        else if (is("numerics", "eps")) rc.eps_rel = to_list(val, key);
        else if (is("numerics", "t_min")) rc.t_min = to_double(val, key);
        else if (is("numerics", "t_max")) rc.t_max = to_double(val, key);
        else if (is("numerics", "t_count")) rc.t_count = to_int(val, key);
        else if (is("sweep", "parameter")) rc.sweep_parameter = val;
        else if (is("sweep", "min")) rc.sweep_min = to_double(val, key);
        else if (is("sweep", "max")) rc.sweep_max = to_double(val, key);
        else if (is("sweep", "count")) rc.sweep_count = to_int(val, key);
        else if (is("sweep", "log")) rc.sweep_log = to_bool(val, key);
        else if (is("simulate", "d")) rc.sim_d = to_int(val, key);
        else if (is("simulate", "seeds")) rc.sim_seeds = to_int(val, key);
        else if (is("simulate", "dt")) rc.sim_dt = to_double(val, key);
        else if (is("simulate", "mode")) rc.sim_mode = val;
        else if (is("output", "dir")) rc.out_dir = val;
        else if (is("output", "prefix")) rc.prefix = val;
        else throw ConfigError("unknown config key [" + section + "] " + key);
    }
    if (rc.sweep_parameter) {
        static const std::vector<std::string> known = {"psi", "phi", "lambda", "t"};
        if (std::find(known.begin(), known.end(), *rc.sweep_parameter) == known.end())
            throw ConfigError("unknown sweep parameter: " + *rc.sweep_parameter);
        if (rc.sweep_count < 1) throw ConfigError("sweep count must be >= 1");
    }
    if (rc.sim_mode != "exact" && rc.sim_mode != "euler")
        throw ConfigError("simulate mode must be 'exact' or 'euler'");
    return rc;
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot open config file: " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_run_config(ss.str());
}

std::string RunConfig::dump() const {
    std::ostringstream o;
    o << "[model]\n";
    if (activation) o << "activation = " << *activation << "\n";
    if (mu) o << "mu = " << format_double(*mu) << "\n";
    if (nu) o << "nu = " << format_double(*nu) << "\n";
    o << "psi = " << format_double(psi) << "\n";
    o << "phi = " << format_double(phi) << "\n";
    o << "r = " << format_double(r) << "\n";
    o << "s = " << format_double(s) << "\n";
    o << "lambda = " << format_double(lambda) << "\n";
    o << "\n[numerics]\n";
    o << "grid_points = " << grid_points << "\n";
    o << "grid_points_2d = " << grid_points_2d << "\n";
    o << "offset = " << format_double(offset) << "\n";
    o << "eps = ";
    for (std::size_t i = 0; i < eps_rel.size(); ++i)
        o << (i ? "," : "") << format_double(eps_rel[i]);
    o << "\n";
    o << "t_min = " << format_double(t_min) << "\n";
    o << "t_max = " << format_double(t_max) << "\n";
    o << "t_count = " << t_count << "\n";
    if (sweep_parameter) {
        o << "\n[sweep]\n";
        o << "parameter = " << *sweep_parameter << "\n";
        o << "min = " << format_double(sweep_min) << "\n";
        o << "max = " << format_double(sweep_max) << "\n";
        o << "count = " << sweep_count << "\n";
        o << "log = " << (sweep_log ? "true" : "false") << "\n";
    }
    o << "\n[simulate]\n";
    o << "d = " << sim_d << "\n";
    o << "seeds = " << sim_seeds << "\n";
    o << "dt = " << format_double(sim_dt) << "\n";
    o << "mode = " << sim_mode << "\n";
    o << "\n[output]\n";
    o << "dir = " << out_dir << "\n";
    o << "prefix = " << prefix << "\n";
    return o.str();
}

}  // namespace rfflow
