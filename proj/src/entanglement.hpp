#pragma once

#include <array>

#include "sdp.hpp"

namespace dicke3 {

// Pairwise concurrence of a symmetric three-qubit state from collective spin
// moments: C = max{0, C_y, C_z}.
double concurrence_collective(const DensityMatrix& rho4);

// `part` is a qubit mask (qubit_a | qubit_b | qubit_c subsets); must be a
// nonempty proper subset.
CMatrix partial_transpose(const DensityMatrix& rho8, unsigned part);

// (||rho^{T_part}||_1 - 1) / 2
double negativity(const DensityMatrix& rho8, unsigned part);

struct WitnessResult {
    double value{0.0};
    CMatrix witness;
    std::array<CMatrix, 3> p; // P_A, P_B, P_C
    std::array<CMatrix, 3> q; // Q_A, Q_B, Q_C
    SdpStatus status{SdpStatus::numerical_failure};
    double relative_gap{0.0};
    double optimum{0.0};
    int iterations{0};
};

// Genuine multipartite negativity via the fully decomposable witness program.
// Throws solver_failure unless the solver reports an optimal point.
WitnessResult gme(const DensityMatrix& rho8, const SdpOptions& options = {});

} // namespace dicke3
