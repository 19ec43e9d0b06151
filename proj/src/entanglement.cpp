#include "entanglement.hpp"

#include <cmath>
#include <sstream>

#include "dynamics.hpp"

namespace dicke3 {

namespace {

constexpr double sqrt_clamp = 1e-10;

// C_n = {N^2 - 4<S_n^2> - sqrt([N(N-2) + 4<S_n^2>]^2 - [4(N-1)<S_n>]^2)} / 2N(N-1)
// with N = 3, from the populations p_m of the S_n eigenbasis. The square-root
// argument is written as f+ f-, f+- = sum_m p_m (2m +- 1)(2m +- 3).
double concurrence_component(const std::array<double, 4>& pops, const std::array<double, 4>& ms) {
    constexpr double n = 3.0;
    double lead = 0.0, fplus = 0.0, fminus = 0.0;
    for (int k = 0; k < 4; ++k) {
        const double m = ms[k];
        lead += pops[k] * (n * n - 4.0 * m * m);
        fplus += pops[k] * (2.0 * m + 1.0) * (2.0 * m + 3.0);
        fminus += pops[k] * (2.0 * m - 1.0) * (2.0 * m - 3.0);
    }
    double arg = fplus * fminus;
    if (arg < 0.0) {
        if (arg < -sqrt_clamp) {
            std::ostringstream os;
            os << "concurrence: negative square-root argument " << arg << " (state is not a valid symmetric state)";
            fail(ErrorCode::invalid_state, os.str());
        }
        arg = 0.0;
    }
    return (lead - std::sqrt(arg)) / (2.0 * n * (n - 1.0));
}

// Populations of rho4 in the eigenbasis of the collective spin component.
void axis_populations(const CMatrix& rho4, SpinAxis axis, std::array<double, 4>& pops, std::array<double, 4>& ms) {
    if (axis == SpinAxis::z) {
        for (int s = 0; s < spin_dim; ++s) {
            pops[s] = rho4(s, s).real();
            ms[s] = m_of(s);
        }
        return;
    }
    Eigen::SelfAdjointEigenSolver<CMatrix> es(spin_matrices().jy);
    const CMatrix rot = es.eigenvectors().adjoint() * rho4 * es.eigenvectors();
    for (int k = 0; k < spin_dim; ++k) {
        pops[k] = rot(k, k).real();
        ms[k] = 0.5 * std::round(2.0 * es.eigenvalues()(k));
    }
}

} // namespace

double concurrence_collective(const DensityMatrix& rho4) {
    if (rho4.basis() != DensityBasis::spin) fail(ErrorCode::invalid_argument, "concurrence expects a spin-sector state");
    double c = 0.0;
    for (SpinAxis axis : {SpinAxis::y, SpinAxis::z}) {
        std::array<double, 4> pops{}, ms{};
        axis_populations(rho4.matrix(), axis, pops, ms);
        c = std::max(c, concurrence_component(pops, ms));
    }
    return std::min(c, 1.0);
}

namespace {

void check_part(unsigned part) {
    if (part == 0 || part >= 7u)
        fail(ErrorCode::invalid_argument, "partial transpose needs a nonempty proper subset of {A, B, C}");
}

} // namespace

CMatrix partial_transpose(const DensityMatrix& rho8, unsigned part) {
    if (rho8.basis() != DensityBasis::qubits) fail(ErrorCode::invalid_argument, "partial transpose expects a three-qubit state");
    check_part(part);
    return partial_transpose_raw(rho8.matrix(), part);
}

double negativity(const DensityMatrix& rho8, unsigned part) {
    const CMatrix pt = partial_transpose(rho8, part);
    Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (pt + pt.adjoint()), Eigen::EigenvaluesOnly);
    double neg = 0.0;
    for (int i = 0; i < es.eigenvalues().size(); ++i) neg += std::max(0.0, -es.eigenvalues()(i));
    return neg;
}

WitnessResult gme(const DensityMatrix& rho8, const SdpOptions& options) {
    if (rho8.basis() != DensityBasis::qubits) fail(ErrorCode::invalid_argument, "GME expects a three-qubit state");
    const ConicProgram prog = build_gme_program(rho8.matrix());
    const SdpSolution sol = solve_sdp(prog, options);
    if (sol.status != SdpStatus::optimal) {
        std::ostringstream os;
        os << "GME solver ended with status " << to_string(sol.status) << " after " << sol.iterations
           << " iterations (relative gap " << sol.relative_gap << ")";
        if (!sol.message.empty()) os << ": " << sol.message;
        fail(ErrorCode::solver_failure, os.str());
    }
    using namespace gme_layout;
    WitnessResult res;
    res.status = sol.status;
    res.relative_gap = sol.relative_gap;
    res.optimum = sol.primal_objective;
    res.iterations = sol.iterations;
    for (int m = 0; m < 3; ++m) {
        res.p[m] = hermitian_extract(sol.x[p_block(m)]);
        res.q[m] = hermitian_extract(sol.x[q_block(m)]);
    }
    res.witness = res.p[0] + partial_transpose_raw(res.q[0], party_mask(0));
    res.value = std::max(0.0, -sol.primal_objective);
    return res;
}

} // namespace dicke3
