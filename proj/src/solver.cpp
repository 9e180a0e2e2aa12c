#include "rfflow/solver.hpp"

#include <Eigen/Dense>
#include <cmath>

namespace rfflow {

namespace {

constexpr double kNewtonTol = 1e-12;
constexpr int kNewtonMaxIter = 200;
constexpr int kMaxHalvings = 40;

using Vec3 = Eigen::Vector3cd;
using Mat3 = Eigen::Matrix3cd;

Vec3 residual3(cdouble x, cdouble g1, cdouble h4, cdouble t1, const ModelConfig& m) {
    const double mu = m.mu, nu = m.nu, psi = m.psi, phi = m.phi, c = m.c;
    cdouble A = c - 1.0 - x * g1;
    Vec3 F;
    F[0] = mu * psi * g1 * h4 - t1;
    F[1] = A * (c - mu * mu * phi * g1 * h4) - c * h4;
    F[2] = 1.0 - g1 * (mu * mu * h4 + A * nu * nu - x);
    return F;
}

Mat3 jacobian3(cdouble x, cdouble g1, cdouble h4, const ModelConfig& m) {
    const double mu = m.mu, nu = m.nu, psi = m.psi, phi = m.phi, c = m.c;
    cdouble A = c - 1.0 - x * g1;
    cdouble B = c - mu * mu * phi * g1 * h4;
    Mat3 J;
    J(0, 0) = mu * psi * h4;
    J(0, 1) = mu * psi * g1;
    J(0, 2) = -1.0;
    J(1, 0) = -x * B - A * mu * mu * phi * h4;
    J(1, 1) = -A * mu * mu * phi * g1 - c;
    J(1, 2) = 0.0;
    J(2, 0) = -(mu * mu * h4 + A * nu * nu - x) + g1 * x * nu * nu;
    J(2, 1) = -mu * mu * g1;
    J(2, 2) = 0.0;
    return J;
}

// Damped Newton with residual infinity-norm convergence.  Accepts when the
// residual drops below kNewtonTol, or below machine precision relative to the
// size of the terms entering the equations (relevant near the pole at 0).
bool newton(cdouble x, Vec3& v, const ModelConfig& m) {
    const double term_scale =
        1.0 + std::abs(m.mu) * m.psi * 10.0 + m.c + std::abs(v[2]);
    for (int it = 0; it < kNewtonMaxIter; ++it) {
        Vec3 F = residual3(x, v[0], v[1], v[2], m);
        double n0 = F.cwiseAbs().maxCoeff();
        double scale = term_scale + std::abs(v[2]) + std::abs(v[0]) * std::abs(x);
        if (n0 < kNewtonTol || n0 < 1e-14 * scale) return true;
        Mat3 J = jacobian3(x, v[0], v[1], m);
        Vec3 dv = J.fullPivLu().solve(-F);
        if (!dv.allFinite()) return false;
        double lam = 1.0;
        Vec3 vn = v + dv;
        for (int h = 0; h < kMaxHalvings; ++h) {
            Vec3 Fn = residual3(x, vn[0], vn[1], vn[2], m);
            if (Fn.allFinite() && Fn.cwiseAbs().maxCoeff() < n0) break;
            lam *= 0.5;
            vn = v + lam * dv;
        }
        v = vn;
    }
    Vec3 F = residual3(x, v[0], v[1], v[2], m);
    double scale = term_scale + std::abs(v[2]) + std::abs(v[0]) * std::abs(x);
    double n0 = F.cwiseAbs().maxCoeff();
    return n0 < kNewtonTol || n0 < 1e-14 * scale;
}

OnePointSolution pack(cdouble x, const Vec3& v, const ModelConfig& m) {
    OnePointSolution s;
    s.x = x;
    s.g1 = v[0];
    s.h4 = v[1];
    s.t1 = v[2];
    s.g3 = (m.c - 1.0 - x * s.g1) / m.c;
    s.h1 = 1.0 - m.mu * s.t1;
    return s;
}

// Physical branch in the open upper half-plane: Im g1 > 0 and Im g3 <= 0
// (g3 = -x * co-resolvent trace, so its imaginary part is nonpositive there).
bool admissible_upper(cdouble x, const Vec3& v, const ModelConfig& m) {
    if (x.imag() <= 0.0) return true;
    cdouble g3 = (m.c - 1.0 - x * v[0]) / m.c;
    double slack = 1e-9 * (1.0 + std::abs(v[0]));
    return v[0].imag() > -slack && g3.imag() < slack;
}

double anchor_height(const ModelConfig& m) {
    return std::max(10.0, 10.0 * m.spectral_scale());
}

Vec3 anchor_iterate(cdouble xa, const ModelConfig& m) {
    Vec3 v;
    v[0] = -1.0 / xa;
    v[1] = m.c;
    v[2] = 0.0;
    return v;
}

}  // namespace

std::array<cdouble, 3> one_point_residual(const OnePointSolution& s, const ModelConfig& cfg) {
    Vec3 F = residual3(s.x, s.g1, s.h4, s.t1, cfg);
    return {F[0], F[1], F[2]};
}

OnePointSolution solve_one_point(cdouble x, const ModelConfig& cfg,
                                 std::optional<OnePointSolution> seed) {
    if (cfg.degenerate()) throw DegeneratePointError("degenerate model: mu=nu=r=s=0");
    if (x.imag() < 0.0) return conj(solve_one_point(std::conj(x), cfg, seed ? std::optional<OnePointSolution>(conj(*seed)) : std::nullopt));

    Vec3 v;
    if (seed) {
        v << seed->g1, seed->h4, seed->t1;
        if (newton(x, v, cfg) && admissible_upper(x, v, cfg)) return pack(x, v, cfg);
        // fall through to continuation when the warm start fails
    }
    if (x.imag() == 0.0 && x.real() < 0.0)
        return solve_one_point_negative(x.real(), cfg);

    // Vertical continuation from the asymptotic anchor down to Im(x).
    double ytop = anchor_height(cfg);
    double ytgt = std::max(x.imag(), 0.0);
    cdouble xa(x.real(), std::max(ytop, ytgt * 2.0));
    v = anchor_iterate(xa, cfg);
    if (!newton(xa, v, cfg))
        throw SolverDivergenceError("anchor solve failed", {v[0], v[1], v[2]});

    double y = xa.imag();
    int guard = 0;
    while (y > ytgt * 1.0000000001 + 1e-300) {
        double ynext = std::max(y * 0.5, ytgt);
        if (ynext < 1e-12 && ytgt < 1e-12) ynext = ytgt;
        cdouble xc(x.real(), ynext);
        Vec3 vtry = v;
        if (newton(xc, vtry, cfg) && admissible_upper(xc, vtry, cfg)) {
            v = vtry;
            y = ynext;
        } else {
            // halve the descent step
            ynext = 0.5 * (y + ynext);
            cdouble xh(x.real(), ynext);
            vtry = v;
            if (newton(xh, vtry, cfg) && admissible_upper(xh, vtry, cfg)) {
                v = vtry;
                y = ynext;
            } else if (++guard > 200) {
                throw BranchSelectionError("continuation to the real axis stalled; point too near the support?");
            }
        }
        if (++guard > 400)
            throw BranchSelectionError("continuation did not reach the target offset");
    }
    if (!newton(x, v, cfg))
        throw SolverDivergenceError("Newton stagnated at target point", {v[0], v[1], v[2]});
    if (!admissible_upper(x, v, cfg))
        throw BranchSelectionError("no admissible root at target point");
    return pack(x, v, cfg);
}

OnePointSolution solve_one_point_negative(double xt, const ModelConfig& cfg) {
    if (!(xt < 0.0)) throw SolverError("solve_one_point_negative expects x < 0");
    if (cfg.degenerate()) throw DegeneratePointError("degenerate model: mu=nu=r=s=0");
    double x0 = -10.0 * std::max(1.0, cfg.spectral_scale());
    if (x0 > xt) x0 = 2.0 * xt;
    Vec3 v = anchor_iterate(x0, cfg);
    if (!newton(x0, v, cfg))
        throw SolverDivergenceError("negative-axis anchor failed", {v[0], v[1], v[2]});

    auto admissible = [&](double x, const Vec3& u) {
        cdouble g1 = u[0];
        cdouble g3 = (cfg.c - 1.0 - x * g1) / cfg.c;
        double imtol = 1e-9 * (1.0 + std::abs(g1));
        return std::abs(g1.imag()) < imtol && std::abs(g3.imag()) < imtol &&
               g1.real() > 0.0 && g3.real() > 0.0;
    };
    if (!admissible(x0, v))
        throw BranchSelectionError("negative-axis anchor not on the real-positive branch");

    double x = x0, frac = 0.5;
    int fails = 0;
    while (x < xt) {
        double xn = x + (xt - x) * frac;
        if (std::abs(xt - xn) < 1e-14 * std::abs(xt)) xn = xt;
        Vec3 vtry = v;
        if (newton(xn, vtry, cfg) && admissible(xn, vtry)) {
            x = xn;
            v = vtry;
            frac = std::min(0.9, frac * 1.3);
            if (x == xt) break;
        } else {
            frac *= 0.4;
            if (++fails > 400)
                throw BranchSelectionError("negative-axis continuation stalled near x = " + std::to_string(xn));
        }
    }
    Vec3 vf = v;
    if (!newton(xt, vf, cfg) || !admissible(xt, vf))
        throw BranchSelectionError("no real-positive root at x = " + std::to_string(xt));
    vf[0] = vf[0].real();
    vf[1] = vf[1].real();
    vf[2] = vf[2].real();
    return pack(cdouble(xt, 0.0), vf, cfg);
}

std::vector<OnePointSolution> continuation_sweep(const std::vector<cdouble>& points,
                                                 const ModelConfig& cfg) {
    std::vector<OnePointSolution> out;
    out.reserve(points.size());
    std::optional<OnePointSolution> seed;
    for (std::size_t i = 0; i < points.size(); ++i) {
        try {
            out.push_back(solve_one_point(points[i], cfg, seed));
        } catch (SolverError& e) {
            throw SolverError("continuation_sweep failed at point index " + std::to_string(i) +
                              ": " + e.what());
        }
        seed = out.back();
    }
    return out;
}

std::array<cdouble, 4> two_point_residual(const TwoPointSolution& q, const OnePointSolution& sx,
                                          const OnePointSolution& sy, const ModelConfig& m) {
    const double mu = m.mu, nu = m.nu, psi = m.psi, phi = m.phi, c = m.c;
    const cdouble x = q.x, y = q.y;
    const cdouble g1x = sx.g1, h4x = sx.h4, t1x = sx.t1;
    const cdouble g1y = sy.g1, h4y = sy.h4, t1y = sy.t1;
    std::array<cdouble, 4> E;
    E[0] = -mu * mu * g1y * q.q2 + mu * mu * h4x * q.q1 + mu * g1y * t1x + mu * g1y * t1y -
           c * g1y * q.q4 * nu * nu - g1y - q.q1 * x + q.q1 * nu * nu * (c - g1x * x - 1.0);
    E[1] = mu * (phi - psi * g1x * x - psi) * (-mu * g1x * q.q2 + mu * h4y * q.q1 + g1x * t1y) +
           c * q.q4 * (1.0 - mu * t1y) - q.q2;
    E[2] = -mu * mu * phi * g1x * (1.0 - mu * t1x) * q.q4 + mu * mu * q.q5 * (c - g1y * y - 1.0) -
           nu * nu * phi * g1x * q.q4 - phi * q.q4 + q.q1 * nu * nu * (phi - psi * g1y * y - psi);
    E[3] = psi * (mu * mu * phi * g1x * g1y * q.q4 + psi * g1x * g1y + q.q1) * (1.0 - mu * t1y) -
           mu * mu * psi * g1x * q.q5 * (c - g1x * x - 1.0) - q.q5;
    return E;
}

TwoPointSolution solve_two_point(cdouble x, cdouble y, const OnePointSolution& sx,
                                 const OnePointSolution& sy, const ModelConfig& m) {
    const double mu = m.mu, nu = m.nu, psi = m.psi, phi = m.phi, c = m.c;
    const cdouble g1x = sx.g1, h4x = sx.h4, t1x = sx.t1, g3x = sx.g3, h1x = sx.h1;
    const cdouble g1y = sy.g1, h4y = sy.h4, t1y = sy.t1, g3y = sy.g3, h1y = sy.h1;

    Eigen::Matrix4cd A = Eigen::Matrix4cd::Zero();
    Eigen::Vector4cd b = Eigen::Vector4cd::Zero();
    // unknown order: (q1, q2, q4, q5)
    A(0, 0) = mu * mu * h4x - x + nu * nu * c * g3x;
    A(0, 1) = -mu * mu * g1y;
    A(0, 2) = -c * nu * nu * g1y;
    b[0] = g1y * (1.0 - mu * (t1x + t1y));

    const cdouble P = mu * phi * g3x;  // = mu*(phi - psi*g1x*x - psi)
    A(1, 0) = P * mu * h4y;
    A(1, 1) = -P * mu * g1x - 1.0;
    A(1, 2) = c * h1y;
    b[1] = -P * g1x * t1y;

    A(2, 0) = nu * nu * phi * g3y;
    A(2, 2) = -phi * (mu * mu * g1x * h1x + nu * nu * g1x + 1.0);
    A(2, 3) = mu * mu * c * g3y;

    A(3, 0) = psi * h1y;
    A(3, 2) = psi * mu * mu * phi * g1x * g1y * h1y;
    A(3, 3) = -mu * mu * psi * c * g1x * g3x - 1.0;
    b[3] = -psi * psi * g1x * g1y * h1y;

    Eigen::FullPivLU<Eigen::Matrix4cd> lu(A);
    Eigen::Vector4cd q = lu.solve(b);
    // scale-aware singularity check: the residual of the solve must be at
    // machine level relative to the row scales
    Eigen::Vector4cd resid = A * q - b;
    double scale = A.cwiseAbs().rowwise().maxCoeff().maxCoeff() * q.cwiseAbs().maxCoeff() +
                   b.cwiseAbs().maxCoeff();
    if (!q.allFinite() || resid.cwiseAbs().maxCoeff() > 1e-8 * std::max(scale, 1e-300))
        throw DegeneratePointError("two-point system is singular; perturb x, y off the real axis");
    TwoPointSolution out;
    out.x = x;
    out.y = y;
    out.q1 = q[0];
    out.q2 = q[1];
    out.q4 = q[2];
    out.q5 = q[3];
    return out;
}

TransformValues evaluate_transforms(const OnePointSolution& sx,
                                    const std::optional<TwoPointSolution>& two,
                                    const ModelConfig& m) {
    TransformValues tv;
    tv.K = sx.t1;
    tv.L0 = m.r * m.r * sx.g1;
    tv.V = m.s * m.s * (1.0 + sx.x * sx.g1) + (m.c - sx.h4);
    if (two) {
        tv.H0 = m.r * m.r * two->q1;
        tv.W = m.s * m.s * m.c * two->q4 + two->q2;
        tv.has_two_point = true;
    }
    return tv;
}

}  // namespace rfflow
