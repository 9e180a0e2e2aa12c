#pragma once
#include <Eigen/Dense>
#include <array>
#include <map>
#include <string>

#include "rfflow/simulator.hpp"
#include "rfflow/solver.hpp"

namespace rfflow {

struct PencilError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// 13x13 block linear pencil at finite dimension.  Block sizes follow the
// displayed layout: [N, d, N, n, d, N, d, N, d, n, N, d, N]; the assembled
// side is 6N + 5d + 2n.  Blocks (1..6) x (7..13) couple only through
// (1,7) = Theta/sqrt(d), making M block upper-triangular at the top level.
struct PencilMatrix {
    Eigen::MatrixXcd M;
    std::array<int, 13> sizes{};
    std::array<int, 13> offsets{};
    cdouble x{}, y{};
    int d = 0, n = 0, N = 0;

    Eigen::MatrixXcd block(int i, int j) const {  // 1-based block indices
        return M.block(offsets[i - 1], offsets[j - 1], sizes[i - 1], sizes[j - 1]);
    }
};

PencilMatrix build_pencil(const Instance& inst, cdouble x, cdouble y, const ModelConfig& cfg);

// Normalized traces of the seven target blocks of M^{-1}, keyed "i,j".
// Normalizations: (13,13)/N, (7,12)/d, (1,13)/N, (4,10)/n, (2,12)/d,
// (4,4)/n, (2,5)/d.
std::map<std::string, cdouble> block_traces(const PencilMatrix& p);

struct BlockTraceRow {
    std::string block;
    cdouble measured{};
    cdouble predicted{};
    double abs_dev = 0.0;
    double rel_dev = 0.0;
};

struct BlockTraceReport {
    std::vector<BlockTraceRow> rows;
    int d = 0;
    int seeds = 0;
    cdouble x{}, y{};
};

// Monte-Carlo verification of the block-trace identities against the solver.
// Requires d >= 100 and Im x, Im y >= 0.05.
BlockTraceReport verify_pencil(const ModelConfig& cfg, cdouble x, cdouble y, int d, int seeds,
                               std::uint64_t base_seed = 1000);

void write_report_csv(const BlockTraceReport& r, const std::string& path);

}  // namespace rfflow
