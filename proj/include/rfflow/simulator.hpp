#pragma once
#include <Eigen/Dense>
#include <cstdint>
#include <optional>

#include "rfflow/model.hpp"

namespace rfflow {

// Counter-based gaussian stream.  Stream layout (stable across runs and
// documented for reproduction in other languages):
//   key(seed, stream)   = mix(mix(seed) ^ mix(0xA5A5A5A5A5A5A5A5 + stream))
//   u64(key, k)         = mix(key + (k+1) * 0x9E3779B97F4A7C15)   [SplitMix64]
//   uniform(key, k)     = ((u64 >> 11) + 1) * 2^-53               in (0, 1]
//   gaussian(key, k)    = sqrt(-2 ln u_{2k}) * cos(2 pi u_{2k+1}) [Box-Muller]
// Matrices fill matrix-major, row-major: entry (i,j) of an RxC matrix is
// gaussian(i*C + j).  Streams: X=1, Theta=2, beta=3, xi=4, a0=5, Omega=6.
class CounterRng {
  public:
    CounterRng(std::uint64_t seed, std::uint64_t stream);
    double gaussian(std::uint64_t k) const;
    void fill(Eigen::Ref<Eigen::MatrixXd> m, double stddev) const;  // row-major order
    static std::uint64_t mix(std::uint64_t z);

  private:
    std::uint64_t key_;
};

struct SimulatorError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A sampled finite-dimensional model.
struct Instance {
    int d = 0, n = 0, N = 0;
    Eigen::MatrixXd X;      // n x d
    Eigen::MatrixXd Theta;  // N x d
    Eigen::VectorXd beta;   // d
    Eigen::VectorXd xi;     // n
    Eigen::VectorXd a0;     // N
    Eigen::MatrixXd Z;      // n x N = sigma(X Theta^T / sqrt(d))
    std::optional<Eigen::MatrixXd> Omega;  // n x N, for the pencil verifier
    std::uint64_t seed = 0;

    Eigen::VectorXd Y() const { return X * beta / std::sqrt(double(d)) + xi; }
};

// n = round(phi d), N = round(psi d); gaussian entries; deterministic in seed.
Instance sample_instance(int d, const ModelConfig& cfg, const Activation& act,
                         std::uint64_t seed, bool with_omega = false,
                         double memory_budget_gb = 8.0);

// Eigen-decomposition of Z^T Z / N with the flow projected onto it.
struct FlowState {
    Eigen::VectorXd evals;    // eigenvalues of Z^T Z / N, ascending
    Eigen::MatrixXd evecs;    // columns = eigenvectors
    Eigen::VectorXd a0_eig;   // V^T a0
    Eigen::VectorXd b_eig;    // V^T (Z^T Y / sqrt(N))
    Eigen::VectorXd target;   // per-mode fixed point b_i/(lam_i+delta); 0 on null modes
    Eigen::VectorXd proj_th_beta;  // V^T (Theta beta / d), for g(t)
    Eigen::MatrixXd theta_eig;     // Theta^T V (d x N), for h(t)
    double y_sq = 0.0;             // ||Y||^2
    int n = 0, d = 0;
    double null_threshold = 0.0;
};
FlowState make_flow(const Instance& inst, const ModelConfig& cfg);

// Closed-form gradient-flow weights at the requested times (t may be +inf).
std::vector<Eigen::VectorXd> exact_flow(const Instance& inst, const ModelConfig& cfg,
                                        const std::vector<double>& times);

struct EmpiricalErrors {
    double train = 0.0, test = 0.0;
    double g = 0.0, h = 0.0, l = 0.0;
};
// Errors along the exact flow; test error via the finite-d decomposition.
std::vector<EmpiricalErrors> empirical_errors(const FlowState& fs, const ModelConfig& cfg,
                                              const std::vector<double>& times);
std::vector<EmpiricalErrors> empirical_errors(const Instance& inst, const ModelConfig& cfg,
                                              const std::vector<double>& times);

// Explicit-Euler gradient descent in the eigenbasis (identical dynamics, no
// discretization of the projection).  dt2/t_switch mirror the two-step
// schedule used for very long runs; dt2 = 0 disables the second stage.
std::vector<EmpiricalErrors> euler_descent(const Instance& inst, const ModelConfig& cfg,
                                           const std::vector<double>& times, double dt,
                                           double t_switch = 0.0, double dt2 = 0.0);

// Monte-Carlo test error over fresh inputs x0 (sanity check of the
// decomposition; not used by default).
double monte_carlo_test_error(const Instance& inst, const ModelConfig& cfg,
                              const Activation& act, const Eigen::VectorXd& a,
                              int n_samples, std::uint64_t seed);

// Errors of an arbitrary weight vector, computed directly from the instance
// (no eigendecomposition; used for t = 0 anchors and the ridge estimator).
EmpiricalErrors errors_at(const Instance& inst, const ModelConfig& cfg,
                          const Eigen::VectorXd& a);

// Ridge / least-squares estimator a_inf = (Z^T Z/N + delta I)^-1 Z^T Y/sqrt(N),
// via the dual formulation when n < N.
Eigen::VectorXd ridge_estimator(const Instance& inst, const ModelConfig& cfg);

// Eigenvalues of Z^T Z / N (eigenvalues-only fast path).
Eigen::VectorXd gram_eigenvalues(const Instance& inst);

// (1/N) tr (Z^T Z/N - x)^-1 and (1/N) tr R(x) (Theta Theta^T/d) R(y).
cdouble resolvent_trace(const FlowState& fs, cdouble x);
cdouble two_resolvent_trace(const FlowState& fs, cdouble x, cdouble y);

}  // namespace rfflow
