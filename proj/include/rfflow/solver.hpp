#pragma once
#include <array>
#include <optional>
#include <vector>

#include "rfflow/model.hpp"

namespace rfflow {

struct SolverError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
// No root satisfying the branch sign rule was reachable.
struct BranchSelectionError : SolverError {
    using SolverError::SolverError;
};
// Newton stagnated; carries the last iterate for diagnostics.
struct SolverDivergenceError : SolverError {
    std::array<cdouble, 3> last{};
    SolverDivergenceError(const std::string& msg, std::array<cdouble, 3> it)
        : SolverError(msg), last(it) {}
};
struct DegeneratePointError : SolverError {
    using SolverError::SolverError;
};

// Solution of the one-variable algebraic system at a complex point x.
// g3 and h1 are derived: g3 = (c - 1 - x g1)/c, h1 = 1 - mu t1.
struct OnePointSolution {
    cdouble x{};
    cdouble g1{}, h4{}, t1{};
    cdouble g3{}, h1{};
};

// Solution of the two-variable linear system at (x, y); symmetric in (x, y).
struct TwoPointSolution {
    cdouble x{}, y{};
    cdouble q1{}, q2{}, q4{}, q5{};
};

// Stieltjes-transform values assembled from the solutions.
struct TransformValues {
    cdouble K{}, L0{}, V{};
    cdouble H0{}, W{};
    bool has_two_point = false;
};

// Residuals of the three one-point equations, as printed in the source system.
std::array<cdouble, 3> one_point_residual(const OnePointSolution& s, const ModelConfig& cfg);
// Residuals of the four two-point equations.
std::array<cdouble, 4> two_point_residual(const TwoPointSolution& q, const OnePointSolution& sx,
                                          const OnePointSolution& sy, const ModelConfig& cfg);

// Solve at x in the closed upper half-plane (Im x >= 0 expected; Im x < 0 is
// handled by Schwarz reflection).  Without a seed the solver continues from
// the large-imaginary asymptotic anchor down to x.
OnePointSolution solve_one_point(cdouble x, const ModelConfig& cfg,
                                 std::optional<OnePointSolution> seed = std::nullopt);

// Solve at real x < 0 (left of the support) on the branch with g1, g3 real
// positive, by adaptive continuation along the negative real axis.
OnePointSolution solve_one_point_negative(double x, const ModelConfig& cfg);

// Warm-started sweep along an ordered path of points.
std::vector<OnePointSolution> continuation_sweep(const std::vector<cdouble>& points,
                                                 const ModelConfig& cfg);

// The four equations are linear in (q1,q2,q4,q5); solved as a dense 4x4 system.
TwoPointSolution solve_two_point(cdouble x, cdouble y, const OnePointSolution& sx,
                                 const OnePointSolution& sy, const ModelConfig& cfg);

TransformValues evaluate_transforms(const OnePointSolution& sx,
                                    const std::optional<TwoPointSolution>& two,
                                    const ModelConfig& cfg);

inline OnePointSolution conj(const OnePointSolution& s) {
    return {std::conj(s.x),  std::conj(s.g1), std::conj(s.h4),
            std::conj(s.t1), std::conj(s.g3), std::conj(s.h1)};
}

}  // namespace rfflow
