#include "rfflow/model.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

namespace rfflow {

void gauss_hermite(int nodes, std::vector<double>& x, std::vector<double>& w) {
    if (nodes < 1) throw QuadratureError("gauss_hermite: nodes must be >= 1");
    // Nodes are the eigenvalues of the Jacobi matrix of the monic He_k
    // recurrence (off-diagonal sqrt(k)).
    Eigen::VectorXd diag = Eigen::VectorXd::Zero(nodes);
    Eigen::VectorXd sub(std::max(nodes - 1, 0));
    for (int k = 1; k < nodes; ++k) sub[k - 1] = std::sqrt(double(k));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success)
        throw QuadratureError("gauss_hermite: tridiagonal eigensolve failed");

    x.resize(nodes);
    w.resize(nodes);
    for (int i = 0; i < nodes; ++i) x[i] = es.eigenvalues()[i];

    // Weights via the Christoffel function 1/sum_k p_k(xi)^2 with the
    // orthonormal recurrence p_{k+1} = (x p_k - sqrt(k) p_{k-1})/sqrt(k+1).
    // p_k grows like exp(x^2/4) at the extreme nodes, so the recurrence runs
    // with a tracked power-of-two rescale.
    for (int i = 0; i < nodes; ++i) {
        double xi = x[i];
        double pm = 0.0, p = 1.0;
        double sum_m = 1.0;  // sum of squares at current scale
        long scale2 = 0;     // p is implicitly p_true * 2^{-scale2}
        for (int k = 0; k + 1 < nodes; ++k) {
            double pn = (xi * p - std::sqrt(double(k)) * pm) / std::sqrt(double(k + 1));
            pm = p;
            p = pn;
            double a = std::abs(p);
            if (a > 1e120) {
                p = std::ldexp(p, -400);
                pm = std::ldexp(pm, -400);
                sum_m = std::ldexp(sum_m, -800);
                scale2 += 400;
            }
            sum_m += p * p;
        }
        // weight = 1 / (sum_true) = 2^{-2*scale2} / sum_m
        w[i] = std::exp2(double(-2 * scale2)) / sum_m;
        if (!std::isfinite(w[i])) w[i] = 0.0;
    }
    // Guard against accumulated rounding: renormalize to unit total mass.
    double tot = 0.0;
    for (double wi : w) tot += wi;
    for (double& wi : w) wi /= tot;
}

HermiteCoeffs hermite_coefficients(const Activation& act, int nodes) {
    if (nodes < 32) throw QuadratureError("hermite_coefficients: nodes must be >= 32");
    auto eval = [&](int n) {
        std::vector<double> x, w;
        gauss_hermite(n, x, w);
        double m0 = 0.0, m1 = 0.0, m2 = 0.0;
        for (int i = 0; i < n; ++i) {
            double s = act.fn(x[i]);
            if (!std::isfinite(s))
                throw QuadratureError("activation not evaluable at node " + std::to_string(x[i]));
            m0 += w[i] * s;
            m1 += w[i] * s * x[i];
            m2 += w[i] * s * s;
        }
        return std::array<double, 3>{m0, m1, m2};
    };
    auto full = eval(nodes);
    auto half = eval(std::max(nodes / 2, 32));
    double quad_err = std::abs(full[0] - half[0]);

    HermiteCoeffs out;
    out.mean = full[0];
    double tol = std::max(1e-6, 3.0 * quad_err);
    if (std::abs(out.mean) > tol)
        throw ConfigError("activation is not centered: <sigma,1> = " + std::to_string(out.mean));

    out.mu = full[1];
    double rad = full[2] - out.mu * out.mu;
    if (rad < 0.0) {
        if (rad < -1e-10)
            throw QuadratureError("negative radicand in nu^2: " + std::to_string(rad));
        rad = 0.0;
    }
    out.nu = std::sqrt(rad);
    return out;
}

Activation activation_by_name(const std::string& name) {
    if (name == "identity")
        return {"identity", [](double x) { return x; }, 200};
    if (name == "relu-centered") {
        const double m = 1.0 / std::sqrt(2.0 * M_PI);
        // kink at 0: Gauss-Hermite converges ~1/n here, so use a dense rule
        return {"relu-centered", [m](double x) { return std::max(x, 0.0) - m; }, 6000};
    }
    if (name == "tanh")
        return {"tanh", [](double x) { return std::tanh(x); }, 200};
    if (name == "tanh5")
        return {"tanh5", [](double x) { return std::tanh(5.0 * x); }, 400};
    throw ConfigError("unknown activation: " + name);
}

std::vector<std::string> activation_names() {
    return {"identity", "relu-centered", "tanh", "tanh5"};
}

Activation make_hermite_activation(double mu, double nu) {
    const double a = nu / std::sqrt(2.0);
    return {"hermite-mix", [mu, a](double x) { return mu * x + a * (x * x - 1.0); }, 200};
}

}  // namespace rfflow
