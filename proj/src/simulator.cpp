#include "rfflow/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rfflow/linalg.hpp"

namespace rfflow {

std::uint64_t CounterRng::mix(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream)
    : key_(mix(mix(seed) ^ mix(0xA5A5A5A5A5A5A5A5ull + stream))) {}

double CounterRng::gaussian(std::uint64_t k) const {
    auto u64 = [&](std::uint64_t i) { return mix(key_ + (i + 1) * 0x9E3779B97F4A7C15ull); };
    double u1 = double((u64(2 * k) >> 11) + 1) * 0x1.0p-53;
    double u2 = double((u64(2 * k + 1) >> 11) + 1) * 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

void CounterRng::fill(Eigen::Ref<Eigen::MatrixXd> m, double stddev) const {
    const auto C = std::uint64_t(m.cols());
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            m(i, j) = stddev * gaussian(std::uint64_t(i) * C + std::uint64_t(j));
}

Instance sample_instance(int d, const ModelConfig& cfg, const Activation& act,
                         std::uint64_t seed, bool with_omega, double memory_budget_gb) {
    if (d < 10) throw SimulatorError("sample_instance: d must be >= 10");
    Instance in;
    in.d = d;
    in.n = int(std::lround(cfg.phi * d));
    in.N = int(std::lround(cfg.psi * d));
    in.seed = seed;
    double gb = 8.0 * (double(in.n) * d + double(in.N) * d +
                       double(in.n) * in.N * (with_omega ? 2.0 : 1.0)) /
                1e9;
    if (gb > memory_budget_gb)
        throw SimulatorError("instance would need " + std::to_string(gb) + " GB > budget");

    in.X.resize(in.n, d);
    CounterRng(seed, 1).fill(in.X, 1.0);
    in.Theta.resize(in.N, d);
    CounterRng(seed, 2).fill(in.Theta, 1.0);
    in.beta.resize(d);
    {
        Eigen::MatrixXd tmp(d, 1);
        CounterRng(seed, 3).fill(tmp, 1.0);
        in.beta = tmp.col(0);
    }
    in.xi.resize(in.n);
    {
        Eigen::MatrixXd tmp(in.n, 1);
        CounterRng(seed, 4).fill(tmp, cfg.s);
        in.xi = tmp.col(0);
    }
    in.a0.resize(in.N);
    {
        Eigen::MatrixXd tmp(in.N, 1);
        CounterRng(seed, 5).fill(tmp, cfg.r);
        in.a0 = tmp.col(0);
    }
    in.Z.noalias() = in.X * in.Theta.transpose() / std::sqrt(double(d));
    for (Eigen::Index i = 0; i < in.Z.rows(); ++i)
        for (Eigen::Index j = 0; j < in.Z.cols(); ++j) in.Z(i, j) = act.fn(in.Z(i, j));
    if (with_omega) {
        in.Omega.emplace(in.n, in.N);
        CounterRng(seed, 6).fill(*in.Omega, 1.0);
    }
    return in;
}

FlowState make_flow(const Instance& inst, const ModelConfig& cfg) {
    FlowState fs;
    const double N = double(inst.N);
    Eigen::MatrixXd G = inst.Z.transpose() * inst.Z / N;
    eigh_inplace(G, fs.evals);  // G becomes the eigenvector matrix
    fs.evecs = std::move(G);
    Eigen::VectorXd Y = inst.Y();
    Eigen::VectorXd b = inst.Z.transpose() * Y / std::sqrt(N);
    fs.a0_eig = fs.evecs.transpose() * inst.a0;
    fs.b_eig = fs.evecs.transpose() * b;
    fs.null_threshold = 1e-12 * std::max(fs.evals.maxCoeff(), 1.0);
    fs.target.resize(inst.N);
    for (int i = 0; i < inst.N; ++i) {
        double lam = fs.evals[i] + cfg.delta;
        // b lies in the row space of Z, so null modes carry b_i = 0 and the
        // mode stays frozen at its initial condition
        fs.target[i] = (lam > fs.null_threshold) ? fs.b_eig[i] / lam : 0.0;
    }
    fs.proj_th_beta = fs.evecs.transpose() * (inst.Theta * inst.beta / double(inst.d));
    fs.theta_eig.noalias() = inst.Theta.transpose() * fs.evecs;
    fs.y_sq = Y.squaredNorm();
    fs.n = inst.n;
    fs.d = inst.d;
    return fs;
}

namespace {

Eigen::VectorXd flow_weights(const FlowState& fs, const ModelConfig& cfg, double t) {
    const int N = int(fs.evals.size());
    Eigen::VectorXd w(N);
    for (int i = 0; i < N; ++i) {
        double lam = fs.evals[i] + cfg.delta;
        if (std::isinf(t)) {
            w[i] = (lam > fs.null_threshold) ? fs.target[i] : fs.a0_eig[i];
        } else {
            double e = lam * t > 700.0 ? 0.0 : std::exp(-lam * t);
            w[i] = e * (fs.a0_eig[i] - fs.target[i]) + fs.target[i];
        }
    }
    return w;
}

EmpiricalErrors errors_from_weights(const FlowState& fs, const ModelConfig& cfg,
                                    const Eigen::VectorXd& w) {
    EmpiricalErrors e;
    const double N = double(w.size());
    double quad = 0.0;
    for (int i = 0; i < w.size(); ++i) quad += fs.evals[i] * w[i] * w[i];
    // ||Y - Z a/sqrt(N)||^2 = ||Y||^2 - 2 b.a + a^T (Z^T Z/N) a with b = Z^T Y/sqrt(N)
    double fit = fs.y_sq - 2.0 * fs.b_eig.dot(w) + quad;
    e.train = fit / double(fs.n) + cfg.lambda * w.squaredNorm() / N;
    e.g = fs.proj_th_beta.dot(w) / std::sqrt(N);
    e.h = (fs.theta_eig * w).squaredNorm() / (double(fs.d) * N);
    e.l = w.squaredNorm() / N;
    e.test = 1.0 + cfg.s * cfg.s - 2.0 * cfg.mu * e.g + cfg.mu * cfg.mu * e.h +
             cfg.nu * cfg.nu * e.l;
    return e;
}

}  // namespace

std::vector<Eigen::VectorXd> exact_flow(const Instance& inst, const ModelConfig& cfg,
                                        const std::vector<double>& times) {
    for (double t : times)
        if (t < 0.0) throw SimulatorError("exact_flow: times must be nonnegative");
    FlowState fs = make_flow(inst, cfg);
    std::vector<Eigen::VectorXd> out;
    out.reserve(times.size());
    for (double t : times) out.push_back(fs.evecs * flow_weights(fs, cfg, t));
    return out;
}

std::vector<EmpiricalErrors> empirical_errors(const FlowState& fs, const ModelConfig& cfg,
                                              const std::vector<double>& times) {
    std::vector<EmpiricalErrors> out;
    out.reserve(times.size());
    for (double t : times) out.push_back(errors_from_weights(fs, cfg, flow_weights(fs, cfg, t)));
    return out;
}

std::vector<EmpiricalErrors> empirical_errors(const Instance& inst, const ModelConfig& cfg,
                                              const std::vector<double>& times) {
    FlowState fs = make_flow(inst, cfg);
    return empirical_errors(fs, cfg, times);
}

std::vector<EmpiricalErrors> euler_descent(const Instance& inst, const ModelConfig& cfg,
                                           const std::vector<double>& times, double dt,
                                           double t_switch, double dt2) {
    if (dt <= 0.0) throw SimulatorError("euler_descent: dt must be > 0");
    FlowState fs = make_flow(inst, cfg);
    std::vector<EmpiricalErrors> out(times.size());
    // advance modes analytically per Euler step: w <- w + dt * (b - (lam+delta) w)
    Eigen::VectorXd w = fs.a0_eig;
    double t = 0.0;
    std::size_t next = 0;
    // emit samples at the first grid time <= current t as we pass them
    std::vector<double> sorted(times);
    for (std::size_t k = 0; k + 1 < sorted.size(); ++k)
        if (sorted[k + 1] < sorted[k]) throw SimulatorError("euler_descent: times must be sorted");
    while (next < sorted.size() && sorted[next] <= t + 1e-15) {
        out[next] = errors_from_weights(fs, cfg, w);
        ++next;
    }
    while (next < sorted.size()) {
        double step = (t_switch > 0.0 && dt2 > 0.0 && t >= t_switch) ? dt2 : dt;
        for (int i = 0; i < w.size(); ++i)
            w[i] += step * (fs.b_eig[i] - (fs.evals[i] + cfg.delta) * w[i]);
        t += step;
        while (next < sorted.size() && sorted[next] <= t + 1e-15) {
            out[next] = errors_from_weights(fs, cfg, w);
            ++next;
        }
    }
    return out;
}

double monte_carlo_test_error(const Instance& inst, const ModelConfig& cfg,
                              const Activation& act, const Eigen::VectorXd& a, int n_samples,
                              std::uint64_t seed) {
    CounterRng rng(seed, 7);
    const double sqd = std::sqrt(double(inst.d));
    const double sqN = std::sqrt(double(inst.N));
    double acc = 0.0;
    Eigen::VectorXd x0(inst.d), z(inst.N);
    std::uint64_t k = 0;
    CounterRng noise(seed, 8);
    for (int m = 0; m < n_samples; ++m) {
        for (int i = 0; i < inst.d; ++i) x0[i] = rng.gaussian(k++);
        z = inst.Theta * x0 / sqd;
        for (int i = 0; i < inst.N; ++i) z[i] = act.fn(z[i]);
        double y = inst.beta.dot(x0) / sqd + cfg.s * noise.gaussian(m);
        double yhat = z.dot(a) / sqN;
        acc += (y - yhat) * (y - yhat);
    }
    return acc / n_samples;
}

EmpiricalErrors errors_at(const Instance& inst, const ModelConfig& cfg,
                          const Eigen::VectorXd& a) {
    EmpiricalErrors e;
    const double N = double(inst.N);
    Eigen::VectorXd Y = inst.Y();
    Eigen::VectorXd resid = Y - inst.Z * a / std::sqrt(N);
    e.train = resid.squaredNorm() / double(inst.n) + cfg.lambda * a.squaredNorm() / N;
    Eigen::VectorXd ta = inst.Theta.transpose() * a;  // d-vector * sqrt(d*N) scale
    e.g = inst.beta.dot(ta) / (double(inst.d) * std::sqrt(N));
    e.h = ta.squaredNorm() / (double(inst.d) * N);
    e.l = a.squaredNorm() / N;
    e.test = 1.0 + cfg.s * cfg.s - 2.0 * cfg.mu * e.g + cfg.mu * cfg.mu * e.h +
             cfg.nu * cfg.nu * e.l;
    return e;
}

Eigen::VectorXd ridge_estimator(const Instance& inst, const ModelConfig& cfg) {
    const double N = double(inst.N);
    Eigen::VectorXd Y = inst.Y();
    if (inst.n <= inst.N) {
        // a = Z^T (Z Z^T/N + delta I_n)^-1 Y / sqrt(N)   (push-through identity)
        Eigen::MatrixXd Gd = Eigen::MatrixXd::Zero(inst.n, inst.n);
        Gd.selfadjointView<Eigen::Lower>().rankUpdate(inst.Z, 1.0 / N);
        Gd.diagonal().array() += cfg.delta;
        Eigen::VectorXd u = Gd.selfadjointView<Eigen::Lower>().llt().solve(Y);
        return inst.Z.transpose() * u / std::sqrt(N);
    }
    Eigen::MatrixXd G = Eigen::MatrixXd::Zero(inst.N, inst.N);
    G.selfadjointView<Eigen::Lower>().rankUpdate(inst.Z.transpose(), 1.0 / N);
    G.diagonal().array() += cfg.delta;
    Eigen::VectorXd b = inst.Z.transpose() * Y / std::sqrt(N);
    return G.selfadjointView<Eigen::Lower>().llt().solve(b);
}

Eigen::VectorXd gram_eigenvalues(const Instance& inst) {
    // spectra of Z^T Z/N and Z Z^T/N agree up to |N - n| zeros; work on the
    // smaller gram matrix
    if (inst.n < inst.N) {
        Eigen::MatrixXd Gd = Eigen::MatrixXd::Zero(inst.n, inst.n);
        Gd.selfadjointView<Eigen::Lower>().rankUpdate(inst.Z, 1.0 / double(inst.N));
        Gd = Eigen::MatrixXd(Gd.selfadjointView<Eigen::Lower>());
        Eigen::VectorXd nz = eigvalsh_inplace(Gd);
        Eigen::VectorXd out = Eigen::VectorXd::Zero(inst.N);
        out.tail(inst.n) = nz;
        std::sort(out.data(), out.data() + out.size());
        return out;
    }
    Eigen::MatrixXd G = Eigen::MatrixXd::Zero(inst.N, inst.N);
    G.selfadjointView<Eigen::Lower>().rankUpdate(inst.Z.transpose(), 1.0 / double(inst.N));
    G = Eigen::MatrixXd(G.selfadjointView<Eigen::Lower>());
    return eigvalsh_inplace(G);
}

cdouble resolvent_trace(const FlowState& fs, cdouble x) {
    cdouble acc = 0.0;
    for (int i = 0; i < fs.evals.size(); ++i) {
        cdouble den = fs.evals[i] - x;
        if (std::abs(den) < 1e-10)
            throw SimulatorError("resolvent_trace: x within 1e-10 of an eigenvalue");
        acc += 1.0 / den;
    }
    return acc / double(fs.evals.size());
}

cdouble two_resolvent_trace(const FlowState& fs, cdouble x, cdouble y) {
    // tr R(x) A R(y) = sum_i A_ii / ((lam_i-x)(lam_i-y)) with A = Theta Theta^T/d
    const int N = int(fs.evals.size());
    const double d = double(fs.d);
    cdouble acc = 0.0;
    for (int i = 0; i < N; ++i) {
        double aii = fs.theta_eig.col(i).squaredNorm() / d;
        acc += aii / ((fs.evals[i] - x) * (fs.evals[i] - y));
    }
    return acc / double(N);
}

}  // namespace rfflow
