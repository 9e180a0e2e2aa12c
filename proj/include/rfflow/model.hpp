#pragma once
#include <cmath>
#include <complex>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace rfflow {

using cdouble = std::complex<double>;

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Parameters of the random-feature model in the proportional regime
// N/d -> psi, n/d -> phi.  c = phi/psi, delta = c*lambda.
struct ModelConfig {
    double mu = 0.0;      // first Hermite coefficient of the activation
    double nu = 0.0;      // orthogonal-part magnitude, >= 0
    double psi = 1.0;     // N/d
    double phi = 1.0;     // n/d
    double r = 0.0;       // std dev of the initial readout weights
    double s = 0.0;       // label-noise std dev
    double lambda = 0.0;  // ridge penalty
    double c = 1.0;       // phi/psi
    double delta = 0.0;   // c*lambda

    ModelConfig() = default;
    ModelConfig(double mu_, double nu_, double psi_, double phi_, double r_,
                double s_, double lambda_)
        : mu(mu_), nu(nu_), psi(psi_), phi(phi_), r(r_), s(s_), lambda(lambda_) {
        if (!(psi > 0.0)) throw ConfigError("psi must be > 0");
        if (!(phi > 0.0)) throw ConfigError("phi must be > 0");
        if (nu < 0.0) throw ConfigError("nu must be >= 0");
        if (r < 0.0) throw ConfigError("r must be >= 0");
        if (s < 0.0) throw ConfigError("s must be >= 0");
        if (lambda < 0.0) throw ConfigError("lambda must be >= 0");
        c = phi / psi;
        delta = c * lambda;
    }

    // All randomness sources switched off: nothing to learn, nothing to measure.
    bool degenerate() const { return mu == 0.0 && nu == 0.0 && r == 0.0 && s == 0.0; }

    // Crude upper bound for the scale of the spectrum of Z^T Z / N.
    double spectral_scale() const {
        double cc = std::max(c, 1.0 / c);
        double e = 1.0 + std::sqrt(cc);
        return (mu * mu + nu * nu) * e * e;
    }
};

// Scalar activation with the evaluation metadata the quadrature needs.
struct Activation {
    std::string name;
    std::function<double(double)> fn;
    int default_nodes = 200;
};

struct HermiteCoeffs {
    double mu = 0.0;
    double nu = 0.0;
    double mean = 0.0;  // <sigma, He_0>; ~0 for a valid centered activation
};

struct QuadratureError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Gauss-Hermite rule for the probabilists' weight, normalized so the weights
// sum to one (expectation against N(0,1)).
void gauss_hermite(int nodes, std::vector<double>& x, std::vector<double>& w);

// mu = <sigma, x>, nu = sqrt(<sigma,sigma> - mu^2) under the standard gaussian.
// Rejects non-centered activations; the rejection threshold accounts for the
// quadrature error of kinked activations (estimated from a half-node rule).
HermiteCoeffs hermite_coefficients(const Activation& act, int nodes);

// Named activations: identity, relu-centered, tanh, tanh5.
Activation activation_by_name(const std::string& name);
std::vector<std::string> activation_names();

// sigma(x) = mu x + nu He2(x)/sqrt(2): exact Hermite coefficients (mu, nu).
// Used to simulate models specified by raw (mu, nu) rather than a named sigma.
Activation make_hermite_activation(double mu, double nu);

}  // namespace rfflow
