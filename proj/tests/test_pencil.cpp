#include <doctest.h>

#include <cmath>

#include "rfflow/linalg.hpp"
#include "rfflow/pencil.hpp"

using namespace rfflow;

namespace {
const ModelConfig kFig9(0.5, 0.3014, 1.8, 1.4, 1.0, 0.0, 0.01);
}

TEST_CASE("pencil assembly: diagonal blocks and layout") {
    auto in = sample_instance(40, kFig9, activation_by_name("identity"), 1, true);
    cdouble x(1.0, 0.1), y(2.0, 0.1);
    auto p = build_pencil(in, x, y, kFig9);
    // block sizes sum to 6N + 5d + 2n
    CHECK(p.M.rows() == 6 * in.N + 5 * in.d + 2 * in.n);
    // block (1,1) = -x I_N, block (13,13) = -y I_N
    Eigen::MatrixXcd b11 = p.block(1, 1);
    CHECK((b11 + x * Eigen::MatrixXcd::Identity(in.N, in.N)).cwiseAbs().maxCoeff() == 0.0);
    Eigen::MatrixXcd b1313 = p.block(13, 13);
    CHECK((b1313 + y * Eigen::MatrixXcd::Identity(in.N, in.N)).cwiseAbs().maxCoeff() == 0.0);
    // top-level triangular structure: blocks (7..13) x (1..6) vanish
    int offD = p.offsets[6];
    CHECK(p.M.block(offD, 0, p.M.rows() - offD, offD).cwiseAbs().maxCoeff() == 0.0);
    // reassembly from the block map reproduces the matrix
    Eigen::MatrixXcd R(p.M.rows(), p.M.cols());
    for (int i = 1; i <= 13; ++i)
        for (int j = 1; j <= 13; ++j)
            R.block(p.offsets[i - 1], p.offsets[j - 1], p.sizes[i - 1], p.sizes[j - 1]) =
                p.block(i, j);
    CHECK((R - p.M).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("degenerate and invalid pencil inputs") {
    ModelConfig bad(0.0, 0.0, 1.8, 1.4, 1.0, 0.5, 0.01);
    auto in = sample_instance(30, kFig9, activation_by_name("identity"), 1, true);
    CHECK_THROWS_AS(build_pencil(in, {1.0, 0.1}, {2.0, 0.1}, bad), PencilError);
    CHECK_THROWS_AS(build_pencil(in, {1.0, 0.0}, {2.0, 0.1}, kFig9), PencilError);
    auto no_omega = sample_instance(30, kFig9, activation_by_name("identity"), 1, false);
    CHECK_THROWS_AS(build_pencil(no_omega, {1.0, 0.1}, {2.0, 0.1}, kFig9), PencilError);
}

TEST_CASE("block traces match a monolithic LU inverse at small d") {
    auto in = sample_instance(30, kFig9, activation_by_name("identity"), 3, true);
    cdouble x(1.0, 0.2), y(2.0, 0.2);
    auto p = build_pencil(in, x, y, kFig9);
    auto tr = block_traces(p);

    Eigen::MatrixXcd B = Eigen::MatrixXcd::Identity(p.M.rows(), p.M.cols());
    ComplexLu lu(p.M);
    lu.solve_inplace(B);  // B = M^{-1}
    auto trace_of = [&](int bi, int bj, double norm) {
        cdouble acc = 0.0;
        for (int k = 0; k < p.sizes[bi - 1]; ++k)
            acc += B(p.offsets[bi - 1] + k, p.offsets[bj - 1] + k);
        return acc / norm;
    };
    CHECK(std::abs(tr["13,13"] - trace_of(13, 13, in.N)) < 1e-10);
    CHECK(std::abs(tr["7,12"] - trace_of(7, 12, in.d)) < 1e-10);
    CHECK(std::abs(tr["1,13"] - trace_of(1, 13, in.N)) < 1e-10);
    CHECK(std::abs(tr["4,10"] - trace_of(4, 10, in.n)) < 1e-10);
    CHECK(std::abs(tr["2,12"] - trace_of(2, 12, in.d)) < 1e-10);
    CHECK(std::abs(tr["4,4"] - trace_of(4, 4, in.n)) < 1e-10);
    CHECK(std::abs(tr["2,5"] - trace_of(2, 5, in.d)) < 1e-10);
}

TEST_CASE("pencil invertible at d = 200 and traces are finite") {
    auto in = sample_instance(200, kFig9, activation_by_name("identity"), 5, true);
    auto p = build_pencil(in, {1.0, 0.1}, {1.0, 0.1}, kFig9);
    auto tr = block_traces(p);
    for (auto& kv : tr) {
        CHECK(std::isfinite(kv.second.real()));
        CHECK(std::isfinite(kv.second.imag()));
    }
}

TEST_CASE("mu = 0 instance: block (7,12) trace vanishes like K") {
    ModelConfig mp(0.0, 1.0, 1.0, 2.0, 1.0, 0.0, 0.01);
    cdouble x(1.0, 0.3), y(2.0, 0.3);
    cdouble acc = 0.0;
    const int d = 150, seeds = 4;
    for (int s = 0; s < seeds; ++s) {
        auto in = sample_instance(d, mp, activation_by_name("identity"), 10 + s, true);
        auto p = build_pencil(in, x, y, mp);
        acc += block_traces(p)["7,12"];
    }
    CHECK(std::abs(acc) / seeds < 3.0 / std::sqrt(double(d)));
}

TEST_CASE("conjugate points give conjugate reports") {
    cdouble x(1.0, 0.3), y(2.0, 0.3);
    const int d = 120;
    auto in = sample_instance(d, kFig9, activation_by_name("identity"), 21, true);
    auto t1 = block_traces(build_pencil(in, x, y, kFig9));
    auto t2 = block_traces(build_pencil(in, std::conj(x), std::conj(y), kFig9));
    for (auto& kv : t1) {
        CHECK(std::abs(t2[kv.first] - std::conj(kv.second)) < 1e-9);
    }
}

TEST_CASE("verify_pencil preconditions") {
    CHECK_THROWS_AS(verify_pencil(kFig9, {1.0, 0.2}, {2.0, 0.2}, 50, 2), PencilError);
    CHECK_THROWS_AS(verify_pencil(kFig9, {1.0, 0.01}, {2.0, 0.2}, 120, 2), PencilError);
}

TEST_CASE("verify at small d: traces land near solver predictions") {
    auto rep = verify_pencil(kFig9, {1.0, 0.2}, {2.0, 0.2}, 120, 4);
    CHECK(rep.rows.size() == 7);
    for (auto& row : rep.rows) {
        INFO(row.block);
        CHECK(row.rel_dev < 0.35);  // 3/sqrt(120) ~ 0.27 per seed, averaged over 4
    }
}
