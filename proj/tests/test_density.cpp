#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "rfflow/density.hpp"

using namespace rfflow;

namespace {
const ModelConfig kMp(0.0, 1.0, 1.0, 2.0, 1.0, 0.0, 0.01);       // c = 2
const ModelConfig kMpHalf(0.0, 1.0, 2.0, 1.0, 1.0, 0.0, 0.01);   // c = 0.5
const ModelConfig kFig9(0.5, 0.3014, 1.8, 1.4, 1.0, 0.0, 0.01);

double mp_density(double r, double nu, double c) {
    double lo = nu * nu * (std::sqrt(c) - 1.0) * (std::sqrt(c) - 1.0);
    double hi = nu * nu * (std::sqrt(c) + 1.0) * (std::sqrt(c) + 1.0);
    if (r <= lo || r >= hi) return 0.0;
    return std::sqrt((hi - r) * (r - lo)) / (2.0 * M_PI * nu * nu * r);
}
}  // namespace

TEST_CASE("MP support edges for (0,1,1,2)") {
    Interval sup = locate_support(kMp);
    double lo = (std::sqrt(2.0) - 1.0) * (std::sqrt(2.0) - 1.0);
    double hi = (std::sqrt(2.0) + 1.0) * (std::sqrt(2.0) + 1.0);
    CHECK(std::abs(sup.lo - lo) < 1e-3);
    CHECK(std::abs(sup.hi - hi) < 1e-3);
}

TEST_CASE("nu scaling: doubling nu scales both edges by 4") {
    ModelConfig scaled(0.0, 2.0, 1.0, 2.0, 1.0, 0.0, 0.01);
    Interval a = locate_support(kMp), b = locate_support(scaled);
    CHECK(std::abs(b.lo - 4.0 * a.lo) < 4e-3);
    CHECK(std::abs(b.hi - 4.0 * a.hi) < 4e-3);
}

TEST_CASE("MP density matches the closed form within 1e-3") {
    auto m = density_1d(Transform::g1, kMp, 201);
    for (std::size_t i = 0; i < m.grid.size(); ++i) {
        CHECK(std::abs(m.density[i] - mp_density(m.grid[i], 1.0, 2.0)) < 1e-3);
    }
    CHECK(std::abs(m.atom0) < 1e-4);   // no atom for c = 2
    CHECK(std::abs(m.mass() - 1.0) < 1e-3);
}

TEST_CASE("rank-forced atom: c = 0.5 gives atom 0.5; c = 2 gives none") {
    std::vector<double> eps;
    Interval sup = locate_support(kMpHalf);
    for (double e : {1e-3, 3e-4, 1e-4, 3e-5, 1e-5}) eps.push_back(e * sup.hi);
    auto a = atom_weight(Transform::g1, kMpHalf, eps);
    CHECK(std::abs(a.value - 0.5) < 1e-3);

    Interval sup2 = locate_support(kMp);
    std::vector<double> eps2;
    for (double e : {1e-3, 3e-4, 1e-4, 3e-5, 1e-5}) eps2.push_back(e * sup2.hi);
    auto b = atom_weight(Transform::g1, kMp, eps2);
    CHECK(std::abs(b.value) < 1e-4);
}

TEST_CASE("atom of K and V vanish when the resolvent is sandwiched by Z") {
    Interval sup = locate_support(kFig9);
    std::vector<double> eps;
    for (double e : {1e-3, 3e-4, 1e-4, 3e-5, 1e-5}) eps.push_back(e * sup.hi);
    CHECK(std::abs(atom_weight(Transform::K, kFig9, eps).value) < 1e-4);
    CHECK(std::abs(atom_weight(Transform::V, kFig9, eps).value) < 1e-4);
    // L0 atom = r^2 (1 - c)
    auto l0 = atom_weight(Transform::L0, kFig9, eps);
    CHECK(std::abs(l0.value - (1.0 - kFig9.c)) < 1e-3);
}

TEST_CASE("eps sequence preconditions") {
    CHECK_THROWS_AS(atom_weight(Transform::g1, kMp, {1e-3, 1e-4}), ExtractionError);
    CHECK_THROWS_AS(atom_weight(Transform::g1, kMp, {1e-3, 5e-4, 3e-4}), ExtractionError);
}

TEST_CASE("L0 density vanishes when r = 0; V is linear in s^2") {
    ModelConfig r0(0.5, 0.3014, 1.8, 1.4, 0.0, 0.0, 0.01);
    auto m = density_1d(Transform::L0, r0, 65);
    for (double d : m.density) CHECK(std::abs(d) < 1e-12);
    CHECK(m.atom0 == 0.0);

    ModelConfig s0(0.5, 0.3014, 1.8, 1.4, 1.0, 0.0, 0.01);
    ModelConfig s1(0.5, 0.3014, 1.8, 1.4, 1.0, 1.0, 0.01);
    auto v0 = density_1d(Transform::V, s0, 65);
    auto v1 = density_1d(Transform::V, s1, 65);
    // difference = density of s^2 (1 + x g1); recompute from g1 and the grid
    auto g = density_1d(Transform::g1, s0, 65);
    for (std::size_t i = 0; i < v0.grid.size(); ++i) {
        double diff = v1.density[i] - v0.density[i];
        // density of (1 + x g1) at r is r * rho_g1(r) for the continuous part
        CHECK(std::abs(diff - v0.grid[i] * g.density[i]) < 1e-6);
    }
}

TEST_CASE("mass sum rules against the large-argument transform limit") {
    for (Transform tr : {Transform::g1, Transform::V, Transform::K}) {
        auto m = density_1d(tr, kFig9, 201);
        // mass = lim -x F(x) at x = 1e6 i
        auto s = solve_one_point({0.0, 1e6}, kFig9);
        cdouble F = tr == Transform::g1 ? s.g1
                    : tr == Transform::V
                        ? kFig9.s * kFig9.s * (1.0 + s.x * s.g1) + (kFig9.c - s.h4)
                        : s.t1;
        double mass_ref = (-s.x * F).real();
        CHECK(std::abs(m.mass() - mass_ref) < 1e-3);
    }
}

TEST_CASE("offset convergence: halving the offset moves the mass by < 1e-3") {
    Interval sup = locate_support(kFig9);
    double off = 1e-6 * sup.width();
    auto a = density_1d(Transform::g1, kFig9, 201, off);
    auto b = density_1d(Transform::g1, kFig9, 201, off / 2.0);
    CHECK(std::abs(a.mass() - b.mass()) < 1e-3);
}

TEST_CASE("edge behavior on a soft-edged bulk") {
    auto m = density_1d(Transform::g1, kMp, 201);
    double peak = *std::max_element(m.density.begin(), m.density.end());
    CHECK(std::abs(m.density.front()) < 0.05 * peak);
    CHECK(std::abs(m.density.back()) < 0.05 * peak);
}

TEST_CASE("2D measures: symmetry, H0 scaling, masses") {
    auto two = density_2d(kFig9, 65, {0.0, 0.0}, 201);
    // symmetry of the W lattice
    double scale = two.W.density.cwiseAbs().maxCoeff();
    double asym = (two.W.density - two.W.density.transpose()).cwiseAbs().maxCoeff();
    CHECK(asym < 1e-6 * std::max(scale, 1.0));
    // H0 total mass r^2 (r = 1), within 5e-3
    CHECK(std::abs(two.H0.mass() - 1.0) < 5e-3);
    // diagonal detected for H0 (it carries most of the mass)
    CHECK(two.H0.has_diagonal);
    // W corner atom clamps to exact zero (w is orthogonal to the null space)
    CHECK(two.W.corner_atom == 0.0);

    // r = 0 kills the whole H0 measure
    ModelConfig r0(0.5, 0.3014, 1.8, 1.4, 0.0, 0.4, 0.01);
    auto two0 = density_2d(r0, 33, {0.0, 0.0}, 65);
    CHECK(two0.H0.density.cwiseAbs().maxCoeff() < 1e-10);
    CHECK(std::abs(two0.H0.mass()) < 1e-8);
}

TEST_CASE("2D/1D consistency: W mass equals the large-argument limit") {
    auto two = density_2d(kFig9, 65, {0.0, 0.0}, 201);
    auto s = solve_one_point({0.0, 1e6}, kFig9);
    auto q = solve_two_point(s.x, s.x, s, s, kFig9);
    cdouble W = kFig9.s * kFig9.s * kFig9.c * q.q4 + q.q2;
    double ref = (s.x * s.x * W).real();
    CHECK(std::abs(two.W.mass() - ref) < 1e-2);
}

TEST_CASE("degenerate config rejected") {
    CHECK_THROWS(locate_support(ModelConfig(0, 0, 1, 1, 0, 0, 0.1)));
}
