#pragma once
#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "rfflow/solver.hpp"

namespace rfflow {

struct ExtractionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct UnreliableAtomError : ExtractionError {
    using ExtractionError::ExtractionError;
};

enum class Transform { K, L0, V, g1 };
Transform transform_by_name(const std::string& name);
std::string transform_name(Transform t);

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    double width() const { return hi - lo; }
};

// Edge-clustered grid on [lo, hi]: u = lo + (hi-lo)*sig(s), sig(s) = s^2(2-s^2)
// with s = (1-cos(theta))/2, theta uniform.  Simpson weights act in theta, so
// square-root edge densities integrate as smooth functions and the clustering
// resolves structure at scale delta near the lower edge.
class EdgeGrid {
  public:
    EdgeGrid() = default;
    EdgeGrid(double lo, double hi, int points);
    const std::vector<double>& nodes() const { return r_; }
    int size() const { return int(r_.size()); }
    double lo() const { return lo_; }
    double hi() const { return hi_; }
    // integral over r of sampled values
    double integrate(const std::vector<double>& f) const;
    template <typename Fn>
    double integrate_fn(const std::vector<double>& f, Fn&& kernel) const {
        double acc = 0.0;
        for (std::size_t i = 0; i < r_.size(); ++i) acc += w_[i] * f[i] * kernel(r_[i]);
        return acc;
    }
    const std::vector<double>& weights() const { return w_; }  // includes jacobian

  private:
    double lo_ = 0.0, hi_ = 0.0;
    std::vector<double> r_, w_;
};

struct SpectralMeasure1D {
    Interval support;
    std::vector<double> grid;     // ordered nodes in the support
    std::vector<double> density;  // values at nodes (possibly signed)
    double atom0 = 0.0;           // Dirac weight at omega = 0
    EdgeGrid quad;                // quadrature owning the nodes

    double mass() const { return atom0 + quad.integrate(density); }
    template <typename Fn>
    double integrate_kernel(Fn&& kernel) const {  // excludes the atom
        return quad.integrate_fn(density, std::forward<Fn>(kernel));
    }
};

struct SpectralMeasure2D {
    std::vector<double> axis;          // lattice axis nodes (same for u and v)
    Eigen::MatrixXd density;           // rho(u_i, v_j), continuous part
    double corner_atom = 0.0;          // alpha_xy at (0,0)
    std::vector<double> fine_grid;     // grid carrying edge/diagonal samples
    std::vector<double> edge_density;  // cross density paired with the atom at 0
    std::vector<double> diagonal_density;  // delta(u-v)-supported component
    bool has_diagonal = false;
    EdgeGrid axis_quad, fine_quad;

    double mass() const;
};

struct AtomEstimate {
    double value = 0.0;
    double spread = 0.0;  // extrapolation disagreement, an error estimate
};

struct DensityOptions {
    int grid_points = 201;     // 1D grids (odd-ified)
    int grid_points_2d = 201;  // 2D lattice per axis
    double offset = 0.0;       // imaginary offset; 0 = auto (1e-6 * width)
    double density_floor = 1e-8;
    std::vector<double> eps_rel = {1e-3, 3e-4, 1e-4, 3e-5, 1e-5};  // atom eps / lambda*
};

// Smallest interval outside which the (extrapolated, pole-subtracted) density
// of g1 stays below the floor.
Interval locate_support(const ModelConfig& cfg, double offset = 0.0,
                        double density_floor = 1e-8);

// alpha = lim eps->0 of eps * Im F(i eps), by least-squares extrapolation in
// eps^2 over the supplied sequence.  Values below 1e-6 are reported as clean 0.
AtomEstimate atom_weight(Transform which, const ModelConfig& cfg,
                         const std::vector<double>& eps_sequence);

SpectralMeasure1D density_1d(Transform which, const ModelConfig& cfg, int grid_points,
                             double offset = 0.0);

struct TwoPointMeasures {
    SpectralMeasure2D W;
    SpectralMeasure2D H0;
};

// Extracts rho_W and rho_H0 (continuous lattice, corner atoms, gap-aware edge
// cross-densities, and the delta(u-v) diagonal component) in one pass.
TwoPointMeasures density_2d(const ModelConfig& cfg, int grid_points_2d,
                            std::pair<double, double> offsets = {0.0, 0.0},
                            int fine_points = 0);

// Values of the transforms and their x-derivatives on the negative real axis,
// used by the infinite-time formulas and by the large-t curve assembly.
struct NegativeAxisValues {
    double K = 0.0, V = 0.0, L0 = 0.0;
    double dV = 0.0, dL0 = 0.0;
    double W = 0.0, H0 = 0.0;  // at (x, x)
    double dV_fd = 0.0;        // central finite-difference cross-check
};
NegativeAxisValues negative_axis_values(const ModelConfig& cfg, double x);

// Bundle of everything the error-curve assembly needs.
struct MeasureSet {
    ModelConfig cfg;
    SpectralMeasure1D K, L0, V, g1;
    TwoPointMeasures two;
    std::optional<NegativeAxisValues> at_minus_delta;  // present when delta > 0
};
MeasureSet build_measures(const ModelConfig& cfg, const DensityOptions& opt = {});

// CSV dump: "node,density" rows with an "# atom0=..." header line.
void write_measure_csv(const SpectralMeasure1D& m, const std::string& path);
// 2D: dense matrix CSV plus companion axis/edge/diagonal files (prefix-based).
void write_measure_csv(const SpectralMeasure2D& m, const std::string& prefix);

}  // namespace rfflow
