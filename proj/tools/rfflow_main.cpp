// rfflow command-line tool: analytic curves, spectral densities, infinite-time
// limits, finite-d simulation, and pencil verification for the random-feature
// gradient-flow model.
#include <CLI11.hpp>
#include <filesystem>
#include <iostream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "rfflow/config.hpp"
#include "rfflow/csvio.hpp"
#include "rfflow/curves.hpp"
#include "rfflow/density.hpp"
#include "rfflow/pencil.hpp"
#include "rfflow/simulator.hpp"

namespace fs = std::filesystem;
using namespace rfflow;

namespace {

struct Global {
    std::string config_path;
    std::string out_dir;
    int threads = 0;
    std::uint64_t seed = 1;
    bool dump_config = false;
};

RunConfig resolve_config(const Global& g) {
    RunConfig rc;
    if (!g.config_path.empty()) rc = load_run_config(g.config_path);
    if (!g.out_dir.empty()) rc.out_dir = g.out_dir;
    return rc;
}

void apply_threads(int threads) {
#ifdef _OPENMP
    if (threads > 0) omp_set_num_threads(threads);
#else
    (void)threads;
#endif
}

std::string out_path(const RunConfig& rc, const std::string& name) {
    fs::create_directories(rc.out_dir);
    return (fs::path(rc.out_dir) / (rc.prefix + "_" + name)).string();
}

std::vector<double> sweep_values(const RunConfig& rc) {
    if (!rc.sweep_parameter) throw ConfigError("config has no [sweep] section");
    std::vector<double> v(rc.sweep_count);
    if (rc.sweep_count == 1) {
        v[0] = rc.sweep_min;
        return v;
    }
    if (rc.sweep_log) {
        double la = std::log(rc.sweep_min), lb = std::log(rc.sweep_max);
        for (int i = 0; i < rc.sweep_count; ++i)
            v[i] = std::exp(la + (lb - la) * i / (rc.sweep_count - 1));
    } else {
        for (int i = 0; i < rc.sweep_count; ++i)
            v[i] = rc.sweep_min + (rc.sweep_max - rc.sweep_min) * i / (rc.sweep_count - 1);
    }
    return v;
}

RunConfig with_sweep_value(RunConfig rc, const std::string& param, double v) {
    if (param == "psi") rc.psi = v;
    else if (param == "phi") rc.phi = v;
    else if (param == "lambda") rc.lambda = v;
    else throw ConfigError("sweep parameter not applicable here: " + param);
    return rc;
}

DensityOptions density_options(const RunConfig& rc) {
    DensityOptions o;
    o.grid_points = rc.grid_points;
    o.grid_points_2d = rc.grid_points_2d;
    o.offset = rc.offset;
    o.eps_rel = rc.eps_rel;
    return o;
}

int cmd_coeffs(const std::string& name, int nodes) {
    Activation a = activation_by_name(name);
    auto hc = hermite_coefficients(a, nodes > 0 ? nodes : a.default_nodes);
    std::cout << "mu=" << format_double(hc.mu) << " nu=" << format_double(hc.nu)
              << " mean=" << format_double(hc.mean) << "\n";
    return 0;
}

int cmd_solve(const RunConfig& rc, double xr, double xi, bool two, double yr, double yi) {
    ModelConfig cfg = rc.model();
    auto sx = solve_one_point({xr, xi}, cfg);
    auto print = [](const char* n, cdouble v) {
        std::cout << n << " = " << format_double(v.real()) << (v.imag() < 0 ? " - " : " + ")
                  << format_double(std::abs(v.imag())) << "i\n";
    };
    print("g1", sx.g1);
    print("h4", sx.h4);
    print("t1", sx.t1);
    print("g3", sx.g3);
    print("h1", sx.h1);
    if (two) {
        auto sy = solve_one_point({yr, yi}, cfg);
        auto q = solve_two_point(sx.x, sy.x, sx, sy, cfg);
        print("q1", q.q1);
        print("q2", q.q2);
        print("q4", q.q4);
        print("q5", q.q5);
        auto tv = evaluate_transforms(sx, q, cfg);
        print("K", tv.K);
        print("L0", tv.L0);
        print("V", tv.V);
        print("H0", tv.H0);
        print("W", tv.W);
    } else {
        auto tv = evaluate_transforms(sx, std::nullopt, cfg);
        print("K", tv.K);
        print("L0", tv.L0);
        print("V", tv.V);
    }
    return 0;
}

int cmd_density(const RunConfig& rc, const std::string& which) {
    ModelConfig cfg = rc.model();
    if (which == "W" || which == "H0" || which == "2d") {
        auto two = density_2d(cfg, rc.grid_points_2d, {rc.offset, rc.offset}, 2 * rc.grid_points);
        write_measure_csv(two.W, out_path(rc, "W"));
        write_measure_csv(two.H0, out_path(rc, "H0"));
        std::cout << "W mass = " << format_double(two.W.mass())
                  << ", H0 mass = " << format_double(two.H0.mass()) << "\n";
        return 0;
    }
    auto m = density_1d(transform_by_name(which), cfg, rc.grid_points, rc.offset);
    write_measure_csv(m, out_path(rc, which + ".csv"));
    std::cout << "support = [" << format_double(m.support.lo) << ", "
              << format_double(m.support.hi) << "], atom0 = " << format_double(m.atom0)
              << ", mass = " << format_double(m.mass()) << "\n";
    return 0;
}

int cmd_curve(const RunConfig& rc) {
    ModelConfig cfg = rc.model();
    MeasureSet ms = build_measures(cfg, density_options(rc));
    ErrorCurve c = error_curves(rc.time_grid(), ms);
    std::string path = out_path(rc, "curve.csv");
    write_curve_csv(c, path);
    std::cout << "wrote " << path << "\n";
    return 0;
}

int cmd_limit(const RunConfig& rc) {
    if (rc.sweep_parameter && *rc.sweep_parameter != "t") {
        auto vals = sweep_values(rc);
        std::string path = out_path(rc, "limit_sweep.csv");
        CsvWriter w(path);
        w.row({*rc.sweep_parameter, "train_inf", "test_inf", "dV"});
        for (double v : vals) {
            RunConfig rcv = with_sweep_value(rc, *rc.sweep_parameter, v);
            auto le = limit_errors(rcv.model());
            w.row_values({v, le.train_inf, le.test_inf, le.dV});
        }
        std::cout << "wrote " << path << "\n";
        return 0;
    }
    auto le = limit_errors(rc.model());
    std::cout << "test_inf = " << format_double(le.test_inf) << "\n"
              << "train_inf = " << format_double(le.train_inf) << "\n"
              << "dV/dx(-delta) = " << format_double(le.dV)
              << " (fd check: " << format_double(le.dV_fd) << ")\n";
    return 0;
}

int cmd_heatmap(const RunConfig& rc) {
    if (!rc.sweep_parameter || *rc.sweep_parameter == "t")
        throw ConfigError("heatmap needs a [sweep] section over psi, phi or lambda");
    auto vals = sweep_values(rc);
    auto times = rc.time_grid();
    if (int(vals.size()) * rc.t_count > 100000)
        throw ConfigError("mesh exceeds budget");
    Eigen::MatrixXd train(vals.size(), times.size()), test(vals.size(), times.size());
    train.setConstant(std::nan(""));
    test.setConstant(std::nan(""));
    int failures = 0;
    for (std::size_t i = 0; i < vals.size(); ++i) {
        try {
            RunConfig rcv = with_sweep_value(rc, *rc.sweep_parameter, vals[i]);
            ModelConfig cfg = rcv.model();
            MeasureSet ms = build_measures(cfg, density_options(rcv));
            ErrorCurve c = error_curves(times, ms);
            for (std::size_t j = 0; j < times.size(); ++j) {
                train(i, j) = c.train[j];
                test(i, j) = c.test[j];
            }
        } catch (std::exception& e) {
            std::cerr << "mesh row " << i << " (" << *rc.sweep_parameter << "=" << vals[i]
                      << ") failed: " << e.what() << "\n";
            ++failures;
        }
    }
    if (failures * 20 > int(vals.size()))
        throw ConfigError("more than 5% of mesh rows failed");
    auto dump = [&](const Eigen::MatrixXd& m, const std::string& name) {
        CsvWriter w(out_path(rc, name + ".csv"));
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            std::vector<double> row(m.cols());
            for (Eigen::Index j = 0; j < m.cols(); ++j) row[j] = m(i, j);
            w.row_values(row);
        }
    };
    dump(train, "heatmap_train");
    dump(test, "heatmap_test");
    {
        CsvWriter w(out_path(rc, "heatmap_sweep_axis.csv"));
        w.row({*rc.sweep_parameter});
        for (double v : vals) w.row_values({v});
    }
    {
        CsvWriter w(out_path(rc, "heatmap_time_axis.csv"));
        w.comment("log-scaled time axis");
        w.row({"t"});
        for (double t : times) w.row_values({t});
    }
    {
        std::ofstream gp(out_path(rc, "heatmap.gp"));
        gp << "# gnuplot script for the heatmaps\n"
           << "set datafile separator ','\n"
           << "set logscale x\n"
           << "set xlabel 't'\nset ylabel '" << *rc.sweep_parameter << "'\n"
           << "set view map\n"
           << "splot '" << rc.prefix << "_heatmap_test.csv' matrix with image title 'test'\n"
           << "pause -1\n"
           << "splot '" << rc.prefix << "_heatmap_train.csv' matrix with image title 'train'\n"
           << "pause -1\n";
    }
    std::cout << "wrote heatmap CSVs (" << failures << " failed rows)\n";
    return 0;
}

int cmd_simulate(const RunConfig& rc, std::uint64_t base_seed) {
    ModelConfig cfg = rc.model();
    // with raw (mu, nu) the simulator uses the Hermite-mix realization, which
    // has those coefficients exactly
    Activation act = rc.activation ? activation_by_name(*rc.activation)
                                   : make_hermite_activation(cfg.mu, cfg.nu);
    auto times = rc.time_grid();
    std::vector<std::vector<EmpiricalErrors>> runs(rc.sim_seeds);
    for (int s = 0; s < rc.sim_seeds; ++s) {
        Instance in = sample_instance(rc.sim_d, cfg, act, base_seed + std::uint64_t(s));
        runs[s] = rc.sim_mode == "euler"
                      ? euler_descent(in, cfg, times, rc.sim_dt)
                      : empirical_errors(in, cfg, times);
        CsvWriter w(out_path(rc, "sim_seed" + std::to_string(s) + ".csv"));
        w.row({"t", "train", "test", "seed"});
        for (std::size_t j = 0; j < times.size(); ++j)
            w.row_values({times[j], runs[s][j].train, runs[s][j].test, double(base_seed + s)});
    }
    CsvWriter w(out_path(rc, "sim_aggregate.csv"));
    w.row({"t", "train_mean", "train_std", "test_mean", "test_std", "n_seeds"});
    for (std::size_t j = 0; j < times.size(); ++j) {
        double mt = 0, me = 0;
        for (auto& r : runs) {
            mt += r[j].train;
            me += r[j].test;
        }
        mt /= rc.sim_seeds;
        me /= rc.sim_seeds;
        double vt = 0, ve = 0;
        for (auto& r : runs) {
            vt += (r[j].train - mt) * (r[j].train - mt);
            ve += (r[j].test - me) * (r[j].test - me);
        }
        int den = std::max(rc.sim_seeds - 1, 1);
        w.row_values({times[j], mt, std::sqrt(vt / den), me, std::sqrt(ve / den),
                      double(rc.sim_seeds)});
    }
    std::cout << "wrote simulation CSVs\n";
    return 0;
}

int cmd_verify_pencil(const RunConfig& rc, double xr, double xi2, double yr, double yi2, int d,
                      int seeds, std::uint64_t base_seed) {
    ModelConfig cfg = rc.model();
    auto rep = verify_pencil(cfg, {xr, xi2}, {yr, yi2}, d, seeds, base_seed);
    std::string path = out_path(rc, "pencil_report.csv");
    write_report_csv(rep, path);
    double worst = 0.0;
    for (auto& row : rep.rows) worst = std::max(worst, row.rel_dev);
    std::cout << "wrote " << path << "; worst rel_err = " << format_double(worst) << "\n";
    return worst < 0.05 ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"random-feature gradient-flow curves, spectra and verification"};
    app.require_subcommand(1);
    Global g;
    app.add_option("--config", g.config_path, "INI run configuration");
    app.add_option("--out", g.out_dir, "output directory (overrides config)");
    app.add_option("--threads", g.threads, "worker threads");
    app.add_option("--seed", g.seed, "base seed for sampling");
    app.add_flag("--dump-config", g.dump_config, "print the resolved config and exit");

    auto* coeffs = app.add_subcommand("coeffs", "Hermite coefficients of an activation");
    std::string act_name = "relu-centered";
    int nodes = 0;
    coeffs->add_option("--activation", act_name, "activation name")->required();
    coeffs->add_option("--nodes", nodes, "quadrature nodes (default per activation)");

    auto* solve = app.add_subcommand("solve", "solve the algebraic systems at a point");
    double xr = 1.0, xi2 = 1e-3, yr = 0.0, yi2 = 0.0;
    bool two = false;
    solve->add_option("--x-re", xr, "Re x");
    solve->add_option("--x-im", xi2, "Im x");
    solve->add_flag("--two", two, "also solve the two-point system at (x,y)");
    solve->add_option("--y-re", yr, "Re y");
    solve->add_option("--y-im", yi2, "Im y");

    auto* density = app.add_subcommand("density", "extract spectral measures");
    std::string which = "g1";
    density->add_option("--transform", which, "K | L0 | V | g1 | 2d");

    auto* curve = app.add_subcommand("curve", "analytic train/test curves");
    auto* limit = app.add_subcommand("limit", "infinite-time limits");
    auto* heatmap = app.add_subcommand("heatmap", "sweep x time mesh");
    auto* simulate = app.add_subcommand("simulate", "finite-d simulator");
    auto* verify = app.add_subcommand("verify-pencil", "pencil block-trace verification");
    double vxr = 1.0, vxi = 0.2, vyr = 2.0, vyi = 0.2;
    int vd = 400, vseeds = 20;
    verify->add_option("--x-re", vxr, "Re x");
    verify->add_option("--x-im", vxi, "Im x");
    verify->add_option("--y-re", vyr, "Re y");
    verify->add_option("--y-im", vyi, "Im y");
    verify->add_option("--d", vd, "dimension d");
    verify->add_option("--seeds", vseeds, "number of instances");

    CLI11_PARSE(app, argc, argv);
    apply_threads(g.threads);

    try {
        RunConfig rc = resolve_config(g);
        if (g.dump_config) {
            std::cout << rc.dump();
            return 0;
        }
        if (coeffs->parsed()) return cmd_coeffs(act_name, nodes);
        if (solve->parsed()) return cmd_solve(rc, xr, xi2, two, yr, yi2);
        if (density->parsed()) return cmd_density(rc, which);
        if (curve->parsed()) return cmd_curve(rc);
        if (limit->parsed()) return cmd_limit(rc);
        if (heatmap->parsed()) return cmd_heatmap(rc);
        if (simulate->parsed()) return cmd_simulate(rc, g.seed);
        if (verify->parsed()) return cmd_verify_pencil(rc, vxr, vxi, vyr, vyi, vd, vseeds, g.seed);
    } catch (ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (SolverError& e) {
        std::cerr << "solver error: " << e.what() << "\n";
        return 2;
    } catch (ExtractionError& e) {
        std::cerr << "extraction error: " << e.what() << "\n";
        return 3;
    } catch (std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    }
    return 0;
}
