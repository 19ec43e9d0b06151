#pragma once

// Dense primal-dual interior-point solver for block-diagonal SDPs in the form
//
//   minimize  <C, X>   subject to  <A_i, X> = b_i,  X = diag(X_1..X_k) >= 0
//   maximize  b^T y    subject to  Z = C - sum_i y_i A_i >= 0
//
// Search direction: HKM scaling with a Mehrotra predictor-corrector step.

#include <optional>
#include <string>
#include <vector>

#include "hilbert.hpp"

namespace dicke3 {

using BlockMatrix = std::vector<RMatrix>;

// One symmetric nonzero: A(row, col) = A(col, row) = value.
struct SparseEntry {
    int block;
    int row;
    int col;
    double value;
};

struct Constraint {
    std::vector<SparseEntry> entries;
};

struct StartPoint {
    BlockMatrix x;
    RVector y;
    BlockMatrix z;
};

struct ConicProgram {
    std::vector<int> block_sizes;
    BlockMatrix objective;
    std::vector<Constraint> constraints;
    RVector rhs;
    std::optional<StartPoint> start;

    int num_constraints() const { return static_cast<int>(constraints.size()); }
};

// Throws invalid_argument on malformed data (sizes, asymmetric objective,
// out-of-range entries) and on linearly dependent constraints. The rank test
// is dense and meant for diagnostics and tests, not per-solve use.
void check_program(const ConicProgram& prog, double rank_tol = 1e-10);

enum class SdpStatus { optimal, max_iter, numerical_failure };

const char* to_string(SdpStatus status);

struct SdpOptions {
    double tol{1e-8};
    int max_iter{100};
};

struct SdpSolution {
    SdpStatus status{SdpStatus::numerical_failure};
    BlockMatrix x;
    RVector y;
    BlockMatrix z;
    double primal_objective{0.0};
    double dual_objective{0.0};
    double relative_gap{0.0};
    double primal_residual{0.0};
    double dual_residual{0.0};
    int iterations{0};
    std::string message;
    // objective values of every iterate, starting point included
    std::vector<double> primal_history;
    std::vector<double> dual_history;
};

SdpSolution solve_sdp(const ConicProgram& prog, const SdpOptions& options = {});

// <A_i, X> for every constraint and the adjoint sum_i y_i A_i.
RVector apply_constraints(const ConicProgram& prog, const BlockMatrix& x);
BlockMatrix adjoint_constraints(const ConicProgram& prog, const RVector& y);

// [[Re H, -Im H], [Im H, Re H]]
RMatrix hermitian_embed(const CMatrix& h);
// Hermitian matrix whose embedding is closest to `s` (averages the redundant
// copies).
CMatrix hermitian_extract(const RMatrix& s);

// Block layout of the GME program: P_A, P_B, P_C, Q_A, Q_B, Q_C, then the
// slacks I - P_A, ..., I - Q_C; every block is 16 x 16.
namespace gme_layout {
constexpr int p_block(int party) { return party; }
constexpr int q_block(int party) { return 3 + party; }
constexpr int slack_block(int block) { return 6 + block; }
constexpr int num_blocks = 12;
constexpr unsigned party_mask(int party) { return 4u >> party; }
} // namespace gme_layout

// minimize Tr(W rho), W = P_M + Q_M^{T_M} for M = A, B, C, 0 <= P_M, Q_M <= I.
ConicProgram build_gme_program(const CMatrix& rho8);

} // namespace dicke3
