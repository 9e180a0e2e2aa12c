#include "rfflow/pencil.hpp"

#include <cmath>

#include "rfflow/csvio.hpp"
#include "rfflow/linalg.hpp"

namespace rfflow {

namespace {
// block-size tags for the 13 groups: 0 -> N, 1 -> d, 2 -> n
constexpr int kTag[13] = {0, 1, 0, 2, 1, 0, 1, 0, 1, 2, 0, 1, 0};
}  // namespace

PencilMatrix build_pencil(const Instance& inst, cdouble x, cdouble y, const ModelConfig& cfg) {
    if (!inst.Omega) throw PencilError("build_pencil: instance carries no Omega");
    if (x.imag() == 0.0 || y.imag() == 0.0)
        throw PencilError("build_pencil: x, y must be off the real axis");
    if (cfg.mu == 0.0 && cfg.nu == 0.0)
        throw PencilError("build_pencil: mu = nu = 0 makes the pencil targets trivial");

    PencilMatrix p;
    p.x = x;
    p.y = y;
    p.d = inst.d;
    p.n = inst.n;
    p.N = inst.N;
    const int dims[3] = {inst.N, inst.d, inst.n};
    int off = 0;
    for (int b = 0; b < 13; ++b) {
        p.sizes[b] = dims[kTag[b]];
        p.offsets[b] = off;
        off += p.sizes[b];
    }
    const int side = off;  // 6N + 5d + 2n
    p.M = Eigen::MatrixXcd::Zero(side, side);

    const double sqd = std::sqrt(double(inst.d));
    const double sqN = std::sqrt(double(inst.N));
    const Eigen::MatrixXd Th = inst.Theta / sqd;       // N x d
    const Eigen::MatrixXd Xs = inst.X / sqN;           // n x d
    const Eigen::MatrixXd Om = cfg.nu * (*inst.Omega) / sqN;  // n x N

    auto put = [&](int i, int j, const Eigen::MatrixXd& A, double scale) {
        if (A.rows() != p.sizes[i - 1] || A.cols() != p.sizes[j - 1])
            throw PencilError("build_pencil: block shape mismatch at (" + std::to_string(i) +
                              "," + std::to_string(j) + ")");
        p.M.block(p.offsets[i - 1], p.offsets[j - 1], A.rows(), A.cols()) =
            (scale * A).cast<cdouble>();
    };
    auto put_id = [&](int i, int j, cdouble scale) {
        if (p.sizes[i - 1] != p.sizes[j - 1])
            throw PencilError("build_pencil: identity pairs unequal sizes");
        p.M.block(p.offsets[i - 1], p.offsets[j - 1], p.sizes[i - 1], p.sizes[j - 1]) =
            scale * Eigen::MatrixXcd::Identity(p.sizes[i - 1], p.sizes[j - 1]);
    };

    // row 1
    put_id(1, 1, -x);
    put(1, 2, Th, -cfg.mu);
    put_id(1, 3, -1.0);
    put(1, 7, Th, 1.0);
    // rows 2..6
    put_id(2, 2, 1.0);
    put(2, 4, Xs.transpose(), 1.0);
    put_id(3, 3, 1.0);
    put(3, 4, Om.transpose(), 1.0);
    put_id(4, 4, 1.0);
    put(4, 5, Xs, 1.0);
    put(4, 6, Om, 1.0);
    put(5, 1, Th.transpose(), cfg.mu);
    put_id(5, 5, 1.0);
    put_id(6, 1, 1.0);
    put_id(6, 6, 1.0);
    // rows 7..13
    put_id(7, 7, 1.0);
    put(7, 13, Th.transpose(), 1.0);
    put_id(8, 8, 1.0);
    put(8, 10, Om.transpose(), 1.0);
    put_id(9, 9, 1.0);
    put(9, 10, Xs.transpose(), 1.0);
    put_id(10, 10, 1.0);
    put(10, 11, Om, 1.0);
    put(10, 12, Xs, 1.0);
    put_id(11, 11, 1.0);
    put_id(11, 13, -1.0);
    put_id(12, 12, 1.0);
    put(12, 13, Th.transpose(), -cfg.mu);
    put_id(13, 8, 1.0);
    put(13, 9, Th, cfg.mu);
    put_id(13, 13, -y);
    return p;
}

std::map<std::string, cdouble> block_traces(const PencilMatrix& p) {
    // Top-level structure: M = [A B; 0 D] over block groups (1..6) and
    // (7..13); B's only nonzero block is (1,7) = Theta/sqrt(d).  The needed
    // blocks of M^{-1} are
    //   (4,4), (2,5)           in A^{-1}
    //   (7,12), (13,13)        in D^{-1}
    //   (1,13), (4,10), (2,12) in -A^{-1} B D^{-1}
    const int offA = p.offsets[6 - 1] + p.sizes[6 - 1];  // side of A
    const int side = int(p.M.rows());
    const int offD = offA;
    const int sideD = side - offA;

    // exactness of the factorization requires the zero lower-left super-block
    if (p.M.block(offD, 0, sideD, offA).cwiseAbs().maxCoeff() != 0.0)
        throw PencilError("pencil not block upper-triangular; layout broken");

    ComplexLu luD(p.M.block(offD, offD, sideD, sideD));
    auto dcol = [&](int b) { return p.offsets[b - 1] - offD; };

    // D^{-1} columns for blocks 10, 12, 13
    const int c10 = dcol(10), c12 = dcol(12), c13 = dcol(13);
    const int w10 = p.sizes[9], w12 = p.sizes[11], w13 = p.sizes[12];
    Eigen::MatrixXcd RD = Eigen::MatrixXcd::Zero(sideD, w10 + w12 + w13);
    for (int k = 0; k < w10; ++k) RD(c10 + k, k) = 1.0;
    for (int k = 0; k < w12; ++k) RD(c12 + k, w10 + k) = 1.0;
    for (int k = 0; k < w13; ++k) RD(c13 + k, w10 + w12 + k) = 1.0;
    luD.solve_inplace(RD);

    std::map<std::string, cdouble> out;
    auto trace_block = [&](const Eigen::MatrixXcd& cols, int row_block, int col0, int width,
                           double norm) {
        cdouble acc = 0.0;
        int r0 = p.offsets[row_block - 1] - offD;
        for (int k = 0; k < width; ++k) acc += cols(r0 + k, col0 + k);
        return acc / norm;
    };
    out["7,12"] = trace_block(RD, 7, w10, w12, double(p.d));
    out["13,13"] = trace_block(RD, 13, w10 + w12, w13, double(p.N));

    ComplexLu luA(p.M.block(0, 0, offA, offA));
    // A^{-1} columns for blocks 4, 5
    const int c4 = p.offsets[3], c5 = p.offsets[4];
    const int w4 = p.sizes[3], w5 = p.sizes[4];
    Eigen::MatrixXcd RA = Eigen::MatrixXcd::Zero(offA, w4 + w5);
    for (int k = 0; k < w4; ++k) RA(c4 + k, k) = 1.0;
    for (int k = 0; k < w5; ++k) RA(c5 + k, w4 + k) = 1.0;
    luA.solve_inplace(RA);
    auto traceA = [&](int row_block, int col0, int width, double norm) {
        cdouble acc = 0.0;
        int r0 = p.offsets[row_block - 1];
        for (int k = 0; k < width; ++k) acc += RA(r0 + k, col0 + k);
        return acc / norm;
    };
    out["4,4"] = traceA(4, 0, w4, double(p.n));
    out["2,5"] = traceA(2, w4, w5, double(p.d));

    // coupling blocks: (M^{-1})^{(i,j)} = -[A^{-1}]^{(i,1)} (Theta/sqrt(d)) [D^{-1}]^{(7,j)}
    const int r7 = dcol(7);
    const int N = p.N, d = p.d;
    const Eigen::MatrixXcd Th = p.block(1, 7);  // N x d block equals Theta/sqrt(d)
    Eigen::MatrixXcd G(offA, w10 + w12 + w13);
    G.setZero();
    // rows of block 1 inside A get Th * [D^{-1}]^{(7, .)}
    G.block(p.offsets[0], 0, N, G.cols()).noalias() = Th * RD.block(r7, 0, d, RD.cols());
    luA.solve_inplace(G);
    auto trace_couple = [&](int row_block, int col0, int width, double norm) {
        cdouble acc = 0.0;
        int r0 = p.offsets[row_block - 1];
        for (int k = 0; k < width; ++k) acc += G(r0 + k, col0 + k);
        return -acc / norm;
    };
    out["4,10"] = trace_couple(4, 0, w10, double(p.n));
    out["2,12"] = trace_couple(2, w10, w12, double(p.d));
    out["1,13"] = trace_couple(1, w10 + w12, w13, double(p.N));
    return out;
}

BlockTraceReport verify_pencil(const ModelConfig& cfg, cdouble x, cdouble y, int d, int seeds,
                               std::uint64_t base_seed) {
    if (d < 100) throw PencilError("verify_pencil: d >= 100 required");
    if (x.imag() < 0.05 || y.imag() < 0.05)
        throw PencilError("verify_pencil: Im x, Im y >= 0.05 required");

    // solver predictions
    auto sx = solve_one_point(x, cfg);
    auto sy = solve_one_point(y, cfg);
    auto q = solve_two_point(x, y, sx, sy, cfg);
    std::map<std::string, cdouble> pred = {
        {"13,13", sy.g1}, {"7,12", sy.t1}, {"1,13", q.q1}, {"4,10", q.q4},
        {"2,12", q.q2},   {"4,4", sx.g3},  {"2,5", sx.h4},
    };

    std::map<std::string, cdouble> acc;
    for (auto& kv : pred) acc[kv.first] = 0.0;
    int ok_seeds = 0, failures = 0;
    Activation ident = activation_by_name("identity");
    for (int s = 0; s < seeds; ++s) {
        try {
            Instance in = sample_instance(d, cfg, ident, base_seed + std::uint64_t(s), true);
            PencilMatrix p = build_pencil(in, x, y, cfg);
            auto tr = block_traces(p);
            for (auto& kv : tr) acc[kv.first] += kv.second;
            ++ok_seeds;
        } catch (std::exception&) {
            if (++failures > seeds / 5)
                throw PencilError("verify_pencil: seed failure rate exceeded 20%");
        }
    }
    if (ok_seeds == 0) throw PencilError("verify_pencil: no seed succeeded");

    BlockTraceReport rep;
    rep.d = d;
    rep.seeds = ok_seeds;
    rep.x = x;
    rep.y = y;
    for (auto& kv : pred) {
        BlockTraceRow row;
        row.block = kv.first;
        row.measured = acc[kv.first] / double(ok_seeds);
        row.predicted = kv.second;
        row.abs_dev = std::abs(row.measured - row.predicted);
        row.rel_dev = row.abs_dev / std::max(std::abs(row.predicted), 1e-300);
        rep.rows.push_back(row);
    }
    return rep;
}

void write_report_csv(const BlockTraceReport& r, const std::string& path) {
    CsvWriter w(path);
    w.row({"block", "measured_re", "measured_im", "predicted_re", "predicted_im", "rel_err"});
    for (const auto& row : r.rows) {
        w.row({"\"(" + row.block + ")\"", format_double(row.measured.real()),
               format_double(row.measured.imag()), format_double(row.predicted.real()),
               format_double(row.predicted.imag()), format_double(row.rel_dev)});
    }
}

}  // namespace rfflow
