#include "rfflow/density.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "rfflow/csvio.hpp"

namespace rfflow {

namespace {

cdouble transform_value(Transform which, const OnePointSolution& s, const ModelConfig& m) {
    switch (which) {
        case Transform::K: return s.t1;
        case Transform::L0: return m.r * m.r * s.g1;
        case Transform::V: return m.s * m.s * (1.0 + s.x * s.g1) + (m.c - s.h4);
        case Transform::g1: return s.g1;
    }
    return {};
}

// Richardson-extrapolated density of `which` at r, with the 1/(0-z) pole of a
// known atom subtracted before taking imaginary parts.
class DensityProbe {
  public:
    DensityProbe(Transform which, const ModelConfig& cfg, double atom)
        : which_(which), cfg_(cfg), atom_(atom) {}

    double raw(double r, double off) {
        auto s = solve_one_point(cdouble(r, off), cfg_, seed_);
        seed_ = s;
        cdouble F = transform_value(which_, s, cfg_);
        if (atom_ != 0.0) F += atom_ / cdouble(r, off);
        return F.imag() / M_PI;
    }
    double extrapolated(double r, double off) {
        double f1 = raw(r, off);
        double f2 = raw(r, 2.0 * off);
        return 2.0 * f1 - f2;
    }

  private:
    Transform which_;
    const ModelConfig& cfg_;
    double atom_;
    std::optional<OnePointSolution> seed_;
};

double auto_offset(double width) { return 1e-6 * width; }

struct EpsFit {
    double value = 0.0;
    double spread = 0.0;
};

// least squares fit h(eps) = a + b*eps^2; spread = max residual of the fit
EpsFit fit_eps2(const std::vector<double>& eps, const std::vector<double>& h) {
    const std::size_t n = eps.size();
    double s0 = double(n), s1 = 0, s2 = 0, ty = 0, t1 = 0;
    for (std::size_t i = 0; i < n; ++i) {
        double e2 = eps[i] * eps[i];
        s1 += e2;
        s2 += e2 * e2;
        ty += h[i];
        t1 += h[i] * e2;
    }
    double det = s0 * s2 - s1 * s1;
    double a = (s2 * ty - s1 * t1) / det;
    double b = (s0 * t1 - s1 * ty) / det;
    double spread = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        spread = std::max(spread, std::abs(h[i] - a - b * eps[i] * eps[i]));
    return {a, spread};
}

}  // namespace

Transform transform_by_name(const std::string& name) {
    if (name == "K") return Transform::K;
    if (name == "L0") return Transform::L0;
    if (name == "V") return Transform::V;
    if (name == "g1") return Transform::g1;
    throw ConfigError("unknown transform selector: " + name);
}

std::string transform_name(Transform t) {
    switch (t) {
        case Transform::K: return "K";
        case Transform::L0: return "L0";
        case Transform::V: return "V";
        case Transform::g1: return "g1";
    }
    return "?";
}

EdgeGrid::EdgeGrid(double lo, double hi, int points) : lo_(lo), hi_(hi) {
    int M = points;
    if (M < 3) M = 3;
    if (M % 2 == 0) ++M;  // Simpson wants an odd node count
    r_.resize(M);
    w_.resize(M);
    const double h = M_PI / (M - 1);
    const double w = hi - lo;
    for (int i = 0; i < M; ++i) {
        double th = i * h;
        double s = 0.5 * (1.0 - std::cos(th));
        double sig = s * s * (2.0 - s * s);
        double dsig = (4.0 * s - 4.0 * s * s * s) * 0.5 * std::sin(th);
        r_[i] = lo + w * sig;
        double simpson = (i == 0 || i == M - 1) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
        w_[i] = simpson * (h / 3.0) * w * dsig;
    }
    r_.front() = lo;
    r_.back() = hi;
}

double EdgeGrid::integrate(const std::vector<double>& f) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < r_.size(); ++i) acc += w_[i] * f[i];
    return acc;
}

double SpectralMeasure2D::mass() const {
    double m = corner_atom;
    const auto& wq = axis_quad.weights();
    for (int i = 0; i < density.rows(); ++i)
        for (int j = 0; j < density.cols(); ++j) m += wq[i] * wq[j] * density(i, j);
    if (!edge_density.empty()) m += fine_quad.integrate(edge_density);
    if (!diagonal_density.empty()) m += fine_quad.integrate(diagonal_density);
    return m;
}

AtomEstimate atom_weight(Transform which, const ModelConfig& cfg,
                         const std::vector<double>& eps_sequence) {
    if (eps_sequence.size() < 3)
        throw ExtractionError("atom_weight: need >= 3 epsilon values");
    double lo = *std::min_element(eps_sequence.begin(), eps_sequence.end());
    double hi = *std::max_element(eps_sequence.begin(), eps_sequence.end());
    if (hi / lo < 99.0)
        throw ExtractionError("atom_weight: epsilon sequence must span >= 2 decades");
    std::vector<double> h;
    h.reserve(eps_sequence.size());
    for (double e : eps_sequence) {
        auto s = solve_one_point(cdouble(0.0, e), cfg);
        h.push_back(e * transform_value(which, s, cfg).imag());
    }
    std::vector<double> eps(eps_sequence.begin(), eps_sequence.end());
    EpsFit fit = fit_eps2(eps, h);
    AtomEstimate out{fit.value, fit.spread};
    if (std::abs(out.value) < 1e-6) {
        out.value = 0.0;
        return out;
    }
    if (out.spread > 0.1 * std::abs(out.value))
        throw UnreliableAtomError("atom extrapolation spread " + std::to_string(out.spread) +
                                  " exceeds 10% of value " + std::to_string(out.value));
    return out;
}

Interval locate_support(const ModelConfig& cfg, double offset, double density_floor) {
    if (cfg.degenerate()) throw ExtractionError("degenerate config: empty spectrum");
    double win = 4.0 * cfg.spectral_scale();
    if (win <= 0.0) throw ExtractionError("degenerate config: zero spectral scale");
    auto dens_top = [&](double r, double off) {
        DensityProbe p(Transform::g1, cfg, 0.0);
        return std::abs(p.extrapolated(r, off));
    };
    int grow = 0;
    while (dens_top(win, offset > 0 ? offset : 1e-7 * win) > density_floor) {
        win *= 1.5;
        if (++grow > 60) throw ExtractionError("support window did not stabilize");
    }
    // edge detection wants a smaller offset than density extraction: the
    // residual O(offset^3) leakage sets the bracketing resolution
    double off = offset > 0 ? offset : 1e-7 * win;

    // coarse scan for bulk points
    const int scan = 400;
    std::vector<double> rs(scan), dv(scan);
    {
        DensityProbe p(Transform::g1, cfg, 0.0);
        for (int i = 0; i < scan; ++i) {
            rs[i] = win * (i + 1) / scan;
            dv[i] = std::abs(p.extrapolated(rs[i], off));
        }
    }
    int first = -1, last = -1;
    for (int i = 0; i < scan; ++i)
        if (dv[i] > density_floor) {
            if (first < 0) first = i;
            last = i;
        }
    if (first < 0) throw ExtractionError("empty support: density floor never exceeded");

    // upper edge by bisection
    double a = rs[last], b = (last + 1 < scan) ? rs[last + 1] : win;
    for (int it = 0; it < 50; ++it) {
        double m = 0.5 * (a + b);
        if (dens_top(m, off) > density_floor) a = m;
        else b = m;
    }
    double lam1 = b;

    // atom of g1, for pole-subtracted refinement of the lower edge
    std::vector<double> eps = {1e-3 * lam1, 3e-4 * lam1, 1e-4 * lam1, 3e-5 * lam1, 1e-5 * lam1};
    double ag = 0.0;
    try {
        ag = atom_weight(Transform::g1, cfg, eps).value;
    } catch (UnreliableAtomError&) {
        ag = 0.0;  // no reliable atom; treat the edge scan without subtraction
    }
    double lam0 = 0.0;
    {
        double lo2 = 0.0, hi2 = rs[first];
        for (int it = 0; it < 50; ++it) {
            double m = 0.5 * (lo2 + hi2);
            DensityProbe q(Transform::g1, cfg, ag);
            if (std::abs(q.extrapolated(m, off)) > density_floor) hi2 = m;
            else lo2 = m;
        }
        lam0 = lo2;
    }
    if (lam0 < 0.0) lam0 = 0.0;
    return {lam0, lam1};
}

SpectralMeasure1D density_1d(Transform which, const ModelConfig& cfg, int grid_points,
                             double offset) {
    if (grid_points < 16) throw ExtractionError("density_1d: grid_points must be >= 16");
    Interval sup = locate_support(cfg, 0.0);
    double off = offset > 0 ? offset : auto_offset(sup.width());

    std::vector<double> eps = {1e-3 * sup.hi, 3e-4 * sup.hi, 1e-4 * sup.hi,
                               3e-5 * sup.hi, 1e-5 * sup.hi};
    double atom = atom_weight(which, cfg, eps).value;

    SpectralMeasure1D m;
    m.support = sup;
    m.quad = EdgeGrid(sup.lo, sup.hi, grid_points);
    m.grid = m.quad.nodes();
    m.atom0 = atom;
    m.density.resize(m.grid.size());

    std::optional<OnePointSolution> s1, s2;
    for (std::size_t i = 0; i < m.grid.size(); ++i) {
        double r = m.grid[i];
        try {
            auto a = solve_one_point(cdouble(r, off), cfg, s1);
            auto b = solve_one_point(cdouble(r, 2.0 * off), cfg, s2);
            s1 = a;
            s2 = b;
            cdouble F1 = transform_value(which, a, cfg) + (atom != 0.0 ? atom / cdouble(r, off) : 0.0);
            cdouble F2 = transform_value(which, b, cfg) + (atom != 0.0 ? atom / cdouble(r, 2.0 * off) : 0.0);
            m.density[i] = (2.0 * F1.imag() - F2.imag()) / M_PI;
        } catch (SolverError& e) {
            throw ExtractionError("density_1d failed at node " + std::to_string(i) + ": " + e.what());
        }
    }
    if (which == Transform::g1) {
        double neg = 0.0;
        for (double d : m.density) neg = std::min(neg, d);
        double peak = *std::max_element(m.density.begin(), m.density.end());
        if (neg < -1e-4 * std::max(peak, 1.0))
            throw ExtractionError("probability-type density has negative mass: " + std::to_string(neg));
    }
    return m;
}

NegativeAxisValues negative_axis_values(const ModelConfig& cfg, double x) {
    if (!(x < 0.0)) throw SolverError("negative_axis_values expects x < 0");
    NegativeAxisValues out;
    auto s = solve_one_point_negative(x, cfg);
    out.K = s.t1.real();
    out.L0 = (cfg.r * cfg.r * s.g1).real();
    out.V = (cfg.s * cfg.s * (1.0 + s.x * s.g1) + (cfg.c - s.h4)).real();
    auto q = solve_two_point(s.x, s.x, s, s, cfg);
    out.W = (cfg.s * cfg.s * cfg.c * q.q4 + q.q2).real();
    out.H0 = (cfg.r * cfg.r * q.q1).real();

    // Implicit differentiation of the one-point system:
    //   J * (dg1, dh4, dt1) = -dF/dx.
    const double mu = cfg.mu, nu = cfg.nu, psi = cfg.psi, phi = cfg.phi, c = cfg.c;
    cdouble g1 = s.g1, h4 = s.h4;
    cdouble A = c - 1.0 - s.x * g1;
    cdouble B = c - mu * mu * phi * g1 * h4;
    Eigen::Matrix3cd J;
    J(0, 0) = mu * psi * h4;
    J(0, 1) = mu * psi * g1;
    J(0, 2) = -1.0;
    J(1, 0) = -s.x * B - A * mu * mu * phi * h4;
    J(1, 1) = -A * mu * mu * phi * g1 - c;
    J(1, 2) = 0.0;
    J(2, 0) = -(mu * mu * h4 + A * nu * nu - s.x) + g1 * s.x * nu * nu;
    J(2, 1) = -mu * mu * g1;
    J(2, 2) = 0.0;
    Eigen::Vector3cd Fx;
    Fx[0] = 0.0;
    Fx[1] = -g1 * B;
    Fx[2] = g1 * (g1 * nu * nu + 1.0);
    Eigen::Vector3cd du = J.fullPivLu().solve(-Fx);
    out.dV = (cfg.s * cfg.s * (g1 + s.x * du[0]) - du[1]).real();
    out.dL0 = (cfg.r * cfg.r * du[0]).real();

    // finite-difference cross-check of dV/dx
    double h = 1e-5 * std::abs(x);
    auto sp = solve_one_point_negative(x + h, cfg);
    auto sm = solve_one_point_negative(x - h, cfg);
    double Vp = (cfg.s * cfg.s * (1.0 + sp.x * sp.g1) + (cfg.c - sp.h4)).real();
    double Vm = (cfg.s * cfg.s * (1.0 + sm.x * sm.g1) + (cfg.c - sm.h4)).real();
    out.dV_fd = (Vp - Vm) / (2.0 * h);
    return out;
}

namespace {

struct TwoPointEval {
    const ModelConfig& cfg;
    // returns (W, H0) at (x, y)
    std::pair<cdouble, cdouble> operator()(cdouble x, const OnePointSolution& sx, cdouble y,
                                           const OnePointSolution& sy) const {
        auto q = solve_two_point(x, y, sx, sy, cfg);
        cdouble W = cfg.s * cfg.s * cfg.c * q.q4 + q.q2;
        cdouble H0 = cfg.r * cfg.r * q.q1;
        return {W, H0};
    }
};

}  // namespace

TwoPointMeasures density_2d(const ModelConfig& cfg, int grid_points_2d,
                            std::pair<double, double> offsets, int fine_points) {
    if (grid_points_2d < 16) throw ExtractionError("density_2d: grid_points >= 16 required");
    Interval sup = locate_support(cfg, 0.0);
    double D = offsets.first > 0 ? offsets.first : auto_offset(sup.width());
    if (fine_points <= 0) fine_points = 2 * grid_points_2d;

    TwoPointMeasures out;
    TwoPointEval eval{cfg};

    EdgeGrid axisq(sup.lo, sup.hi, grid_points_2d);
    EdgeGrid fineq(sup.lo, sup.hi, fine_points);
    const int M = axisq.size(), Mf = fineq.size();

    for (SpectralMeasure2D* m : {&out.W, &out.H0}) {
        m->axis = axisq.nodes();
        m->fine_grid = fineq.nodes();
        m->axis_quad = axisq;
        m->fine_quad = fineq;
        m->density = Eigen::MatrixXd::Zero(M, M);
        m->edge_density.assign(Mf, 0.0);
        m->diagonal_density.assign(Mf, 0.0);
    }

    // ---- corner atoms:  alpha_xy = lim -eps^2 Re F(i eps, i eps) ----
    {
        std::vector<double> ce = {1e-3 * sup.hi, 3e-4 * sup.hi, 1e-4 * sup.hi};
        std::vector<double> hW, hH;
        for (double e : ce) {
            auto s = solve_one_point(cdouble(0.0, e), cfg);
            auto [Wv, Hv] = eval(s.x, s, s.x, s);
            hW.push_back(-e * e * Wv.real());
            hH.push_back(-e * e * Hv.real());
        }
        out.W.corner_atom = fit_eps2(ce, hW).value;
        out.H0.corner_atom = fit_eps2(ce, hH).value;
        if (std::abs(out.W.corner_atom) < 1e-5) out.W.corner_atom = 0.0;
        if (std::abs(out.H0.corner_atom) < 1e-5) out.H0.corner_atom = 0.0;
    }

    // ---- edge cross-densities (only extractable with a clean gap) ----
    const bool gap_ok = sup.lo > std::max(100.0 * D, 3e-3 * sup.hi);
    std::vector<OnePointSolution> fine_sols =
        continuation_sweep([&] {
            std::vector<cdouble> xs(Mf);
            for (int i = 0; i < Mf; ++i) xs[i] = cdouble(fineq.nodes()[i], D);
            return xs;
        }(), cfg);
    if (gap_ok) {
        std::vector<double> ee = {0.2 * sup.lo, 0.1 * sup.lo, 0.05 * sup.lo};
        std::vector<OnePointSolution> se;
        for (double e : ee) se.push_back(solve_one_point(cdouble(0.0, e), cfg));
        for (int j = 0; j < Mf; ++j) {
            const auto& sy = fine_sols[j];
            auto syc = conj(sy);
            std::vector<double> hw, hh;
            for (std::size_t k = 0; k < ee.size(); ++k) {
                auto [Wp, Hp] = eval(se[k].x, se[k], sy.x, sy);
                auto [Wm, Hm] = eval(se[k].x, se[k], syc.x, syc);
                hw.push_back(ee[k] / M_PI * (Wm - Wp).real());
                hh.push_back(ee[k] / M_PI * (Hm - Hp).real());
            }
            out.W.edge_density[j] = fit_eps2(ee, hw).value;
            out.H0.edge_density[j] = fit_eps2(ee, hh).value;
        }
        // The edge strips of these transforms vanish identically (W's vector
        // is orthogonal to the null space; H0 is diagonal-supported), so an
        // integrated magnitude at the noise floor is clamped to zero.
        std::vector<double> absW(Mf), absH(Mf);
        for (int j = 0; j < Mf; ++j) {
            absW[j] = std::abs(out.W.edge_density[j]);
            absH[j] = std::abs(out.H0.edge_density[j]);
        }
        if (fineq.integrate(absW) < 1e-4)
            std::fill(out.W.edge_density.begin(), out.W.edge_density.end(), 0.0);
        if (fineq.integrate(absH) < 1e-4)
            std::fill(out.H0.edge_density.begin(), out.H0.edge_density.end(), 0.0);
    }

    auto corner_sub = [&](const SpectralMeasure2D& m, cdouble x, cdouble y) -> cdouble {
        return m.corner_atom != 0.0 ? m.corner_atom / (x * y) : cdouble(0.0);
    };

    // ---- continuous lattice ----
    std::vector<OnePointSolution> axis_sols = continuation_sweep([&] {
        std::vector<cdouble> xs(M);
        for (int i = 0; i < M; ++i) xs[i] = cdouble(axisq.nodes()[i], D);
        return xs;
    }(), cfg);

#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < M; ++i) {
        const auto& sx = axis_sols[i];
        for (int j = 0; j < M; ++j) {
            const auto& sy = axis_sols[j];
            auto syc = conj(sy);
            auto [Wp, Hp] = eval(sx.x, sx, sy.x, sy);
            auto [Wm, Hm] = eval(sx.x, sx, syc.x, syc);
            Wp -= corner_sub(out.W, sx.x, sy.x);
            Wm -= corner_sub(out.W, sx.x, syc.x);
            Hp -= corner_sub(out.H0, sx.x, sy.x);
            Hm -= corner_sub(out.H0, sx.x, syc.x);
            out.W.density(i, j) = (Wm - Wp).real() / (2.0 * M_PI * M_PI);
            out.H0.density(i, j) = (Hm - Hp).real() / (2.0 * M_PI * M_PI);
        }
    }

    // lattice diagonal entries are polluted by the delta(u-v) component;
    // replace them by a staggered evaluation at v = u + kappa
    auto staggered = [&](const OnePointSolution& sx, double kappa)
        -> std::pair<double, double> {
        auto sy = solve_one_point(cdouble(sx.x.real() + kappa, D), cfg, sx);
        auto syc = conj(sy);
        auto [Wp, Hp] = eval(sx.x, sx, sy.x, sy);
        auto [Wm, Hm] = eval(sx.x, sx, syc.x, syc);
        Wp -= corner_sub(out.W, sx.x, sy.x);
        Wm -= corner_sub(out.W, sx.x, syc.x);
        Hp -= corner_sub(out.H0, sx.x, sy.x);
        Hm -= corner_sub(out.H0, sx.x, syc.x);
        return {(Wm - Wp).real() / (2.0 * M_PI * M_PI), (Hm - Hp).real() / (2.0 * M_PI * M_PI)};
    };
    for (int i = 0; i < M; ++i) {
        double hl = (i + 1 < M) ? axisq.nodes()[i + 1] - axisq.nodes()[i]
                                : axisq.nodes()[i] - axisq.nodes()[i - 1];
        double kap = std::max(0.5 * std::abs(hl), 1e3 * D);
        auto [w, h] = staggered(axis_sols[i], kap);
        out.W.density(i, i) = w;
        out.H0.density(i, i) = h;
    }
    // symmetry guard: average tiny asymmetries away (solver noise)
    {
        double scale = std::max(out.W.density.cwiseAbs().maxCoeff(), 1e-300);
        double asym = (out.W.density - out.W.density.transpose()).cwiseAbs().maxCoeff();
        out.W.density = 0.5 * (out.W.density + out.W.density.transpose()).eval();
        out.H0.density = 0.5 * (out.H0.density + out.H0.density.transpose()).eval();
        if (asym > 1e-6 * scale)
            std::fprintf(stderr, "density_2d: warning: W lattice asymmetry %.3g of scale, symmetrized\n",
                         asym / scale);
    }

    // ---- diagonal component on the fine grid ----
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < Mf; ++i) {
        const auto& sx = fine_sols[i];
        double hl = (i + 1 < Mf) ? fineq.nodes()[i + 1] - fineq.nodes()[i]
                                 : fineq.nodes()[i] - fineq.nodes()[i - 1];
        double kap = std::max(0.5 * std::abs(hl), 1e3 * D);
        auto sxc = conj(sx);
        auto [Wp, Hp] = eval(sx.x, sx, sx.x, sx);
        auto [Wm, Hm] = eval(sx.x, sx, sxc.x, sxc);
        Wp -= corner_sub(out.W, sx.x, sx.x);
        Wm -= corner_sub(out.W, sx.x, sxc.x);
        Hp -= corner_sub(out.H0, sx.x, sx.x);
        Hm -= corner_sub(out.H0, sx.x, sxc.x);
        double rawW = (Wm - Wp).real() / (2.0 * M_PI * M_PI);
        double rawH = (Hm - Hp).real() / (2.0 * M_PI * M_PI);
        auto sy = solve_one_point(cdouble(sx.x.real() + kap, D), cfg, sx);
        auto syc = conj(sy);
        auto [Wps, Hps] = eval(sx.x, sx, sy.x, sy);
        auto [Wms, Hms] = eval(sx.x, sx, syc.x, syc);
        Wps -= corner_sub(out.W, sx.x, sy.x);
        Wms -= corner_sub(out.W, sx.x, syc.x);
        Hps -= corner_sub(out.H0, sx.x, sy.x);
        Hms -= corner_sub(out.H0, sx.x, syc.x);
        double rcW = (Wms - Wps).real() / (2.0 * M_PI * M_PI);
        double rcH = (Hms - Hps).real() / (2.0 * M_PI * M_PI);
        out.W.diagonal_density[i] = 2.0 * M_PI * D * (rawW - rcW);
        out.H0.diagonal_density[i] = 2.0 * M_PI * D * (rawH - rcH);
    }
    // The sampled diagonal always enters kernel integrals; has_diagonal is the
    // detector's report of a significant delta(u-v) component (mass > 1e-2).
    for (SpectralMeasure2D* m : {&out.W, &out.H0}) {
        double dm = std::abs(m->fine_quad.integrate(m->diagonal_density));
        m->has_diagonal = dm > 1e-2;
    }
    return out;
}

MeasureSet build_measures(const ModelConfig& cfg, const DensityOptions& opt) {
    if (cfg.degenerate()) throw ConfigError("degenerate model: mu=nu=r=s=0");
    MeasureSet ms;
    ms.cfg = cfg;
    ms.K = density_1d(Transform::K, cfg, opt.grid_points, opt.offset);
    ms.L0 = density_1d(Transform::L0, cfg, opt.grid_points, opt.offset);
    ms.V = density_1d(Transform::V, cfg, opt.grid_points, opt.offset);
    ms.g1 = density_1d(Transform::g1, cfg, opt.grid_points, opt.offset);
    ms.two = density_2d(cfg, opt.grid_points_2d, {opt.offset, opt.offset}, 2 * opt.grid_points);
    if (cfg.delta > 0.0) ms.at_minus_delta = negative_axis_values(cfg, -cfg.delta);
    return ms;
}

void write_measure_csv(const SpectralMeasure1D& m, const std::string& path) {
    CsvWriter w(path);
    w.comment("atom0=" + format_double(m.atom0));
    w.row({"node", "density"});
    for (std::size_t i = 0; i < m.grid.size(); ++i) w.row_values({m.grid[i], m.density[i]});
}

void write_measure_csv(const SpectralMeasure2D& m, const std::string& prefix) {
    {
        CsvWriter w(prefix + "_matrix.csv");
        w.comment("corner_atom=" + format_double(m.corner_atom));
        for (int i = 0; i < m.density.rows(); ++i) {
            std::vector<double> row(m.density.cols());
            for (int j = 0; j < m.density.cols(); ++j) row[j] = m.density(i, j);
            w.row_values(row);
        }
    }
    {
        CsvWriter w(prefix + "_axis.csv");
        w.row({"node"});
        for (double v : m.axis) w.row_values({v});
    }
    {
        CsvWriter w(prefix + "_edge.csv");
        w.row({"node", "edge_density", "diagonal_density"});
        for (std::size_t i = 0; i < m.fine_grid.size(); ++i)
            w.row_values({m.fine_grid[i], m.edge_density.empty() ? 0.0 : m.edge_density[i],
                          m.diagonal_density.empty() ? 0.0 : m.diagonal_density[i]});
    }
}

}  // namespace rfflow
