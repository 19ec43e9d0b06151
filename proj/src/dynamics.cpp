#include "dynamics.hpp"

#include <cmath>
#include <numbers>
#include <optional>
#include <sstream>

#include "entanglement.hpp"
#include "parallel.hpp"

namespace dicke3 {

StateVector initial_state(const FockSpace& fock) {
    const double r3 = std::sqrt(3.0);
    // spin index order: m = 3/2, 1/2, -1/2, -3/2
    const Eigen::Vector4cd spin = Eigen::Vector4cd(r3, 1.0, -1.0, -r3) / std::sqrt(8.0);
    return StateVector::product(fock, spin, 0);
}

Evolver::Evolver(const EigenSystem& eig, const StateVector& psi0)
    : fock_(eig.fock), energies_(eig.energies), vectors_(eig.vectors) {
    if (psi0.fock().n_max != eig.fock.n_max)
        fail(ErrorCode::invalid_argument, "initial state and eigensystem use different Fock cutoffs");
    coeffs_ = vectors_.adjoint() * psi0.amplitudes();
    // Displaced-frame vectors truncated at a small cutoff are not orthonormal;
    // bound the norm drift of psi(t) over all times by |c|^T |V^dagger V - 1| |c|.
    const RVector mag = coeffs_.cwiseAbs();
    const CMatrix gram = vectors_.adjoint() * vectors_ - CMatrix::Identity(vectors_.cols(), vectors_.cols());
    const double drift = mag.dot(gram.cwiseAbs() * mag) + (vectors_ * coeffs_ - psi0.amplitudes()).norm();
    if (drift > 1e-10) {
        std::ostringstream os;
        os.precision(3);
        os << to_string(eig.method) << " eigenbasis is not orthonormal on the initial state at n_max = "
           << eig.fock.n_max << " (norm drift up to " << drift << "); increase n_max";
        fail(ErrorCode::invalid_argument, os.str());
    }
}

StateVector Evolver::at(double t) const {
    if (!std::isfinite(t)) fail(ErrorCode::invalid_argument, "evolution time must be finite");
    CVector phased(coeffs_.size());
    for (Eigen::Index j = 0; j < coeffs_.size(); ++j) phased(j) = std::polar(1.0, -energies_(j) * t) * coeffs_(j);
    return StateVector(fock_, vectors_ * phased);
}

std::vector<StateVector> evolve(const EigenSystem& eig, const StateVector& psi0, const std::vector<double>& times) {
    const Evolver ev(eig, psi0);
    std::vector<StateVector> out;
    out.reserve(times.size());
    for (double t : times) out.push_back(ev.at(t));
    return out;
}

CMatrix reduce_spin(const StateVector& psi) {
    const int d = psi.fock().size();
    const auto amps = Eigen::Map<const CMatrix>(psi.amplitudes().data(), d, spin_dim);
    // column s holds the Fock amplitudes of spin index s
    return (amps.adjoint() * amps).transpose();
}

CMatrix to_lab_frame(const CMatrix& rho4) {
    if (rho4.rows() != spin_dim || rho4.cols() != spin_dim) fail(ErrorCode::invalid_argument, "expected a 4x4 spin density");
    const CMatrix v = frame_rotation();
    return v.adjoint() * rho4 * v;
}

StateVector to_lab_frame(const StateVector& psi) {
    const int d = psi.fock().size();
    const CMatrix v = frame_rotation();
    const auto amps = Eigen::Map<const CMatrix>(psi.amplitudes().data(), d, spin_dim);
    CMatrix lab = amps * v.conjugate(); // column s': sum_s conj(V(s, s')) amps(:, s)
    return StateVector(psi.fock(), Eigen::Map<const CVector>(lab.data(), lab.size()));
}

DensityMatrix reduce_to_qubits(const StateVector& psi) {
    return symmetric_embed(DensityMatrix(reduce_spin(psi), DensityBasis::spin));
}

std::array<double, 4> dicke_populations(const CMatrix& rho4) {
    if (rho4.rows() != spin_dim || rho4.cols() != spin_dim) fail(ErrorCode::invalid_argument, "expected a 4x4 spin density");
    return {rho4(0, 0).real(), rho4(1, 1).real(), rho4(2, 2).real(), rho4(3, 3).real()};
}

std::array<double, 4> dicke_populations(const StateVector& psi) { return dicke_populations(reduce_spin(psi)); }

SpinMoments collective_spin_moments(const CMatrix& rho4, SpinAxis axis) {
    if (rho4.rows() != spin_dim || rho4.cols() != spin_dim) fail(ErrorCode::invalid_argument, "expected a 4x4 spin density");
    const SpinMatrices s = spin_matrices();
    CMatrix op;
    switch (axis) {
    case SpinAxis::y: op = s.jy; break;
    case SpinAxis::z: op = s.jz.cast<cplx>(); break;
    default: fail(ErrorCode::invalid_argument, "collective_spin_moments: unsupported axis");
    }
    return {(rho4 * op).trace().real(), (rho4 * op * op).trace().real()};
}

Trajectory run_trajectory(const EigenSystem& eig, const TrajectoryOptions& options) {
    if (!(options.tmax_scaled > 0.0) || !std::isfinite(options.tmax_scaled))
        fail(ErrorCode::invalid_argument, "tmax_scaled must be positive and finite");
    if (options.steps < 1) fail(ErrorCode::invalid_argument, "steps must be at least 1");
    if (options.gme_stride < 1) fail(ErrorCode::invalid_argument, "gme_stride must be at least 1");
    if (!(eig.params.delta > 0.0)) fail(ErrorCode::invalid_argument, "dynamics time axis Δt/2π needs delta > 0");

    const Evolver ev(eig, initial_state(eig.fock));
    const int samples = options.steps + 1;
    const double to_physical = 2.0 * std::numbers::pi / eig.params.delta;

    Trajectory tr;
    tr.method = eig.method;
    tr.times.resize(samples);
    std::vector<std::optional<DensityMatrix>> states(samples);
    tr.populations.resize(samples);
    tr.concurrence.resize(samples);
    tr.negativity_ab_c.resize(samples);

    parallel_for(samples, options.threads, [&](std::size_t i) {
        const double ts = options.tmax_scaled * static_cast<double>(i) / options.steps;
        tr.times[i] = ts;
        const StateVector psi = ev.at(ts * to_physical);
        tr.populations[i] = dicke_populations(psi);
        const DensityMatrix rho_lab(reduce_spin(to_lab_frame(psi)), DensityBasis::spin);
        tr.concurrence[i] = concurrence_collective(rho_lab);
        DensityMatrix rho8 = symmetric_embed(rho_lab);
        tr.negativity_ab_c[i] = negativity(rho8, qubit_c);
        states[i].emplace(std::move(rho8));
    });
    tr.states.reserve(samples);
    for (auto& s : states) tr.states.push_back(std::move(*s));

    tr.gme.assign(samples, 0.0);
    tr.gme_computed.assign(samples, false);
    if (options.compute_gme) {
        std::vector<int> picks;
        for (int i = 0; i < samples; i += options.gme_stride) picks.push_back(i);
        if (picks.back() != samples - 1) picks.push_back(samples - 1);
        parallel_for(picks.size(), options.threads, [&](std::size_t k) {
            tr.gme[picks[k]] = gme(tr.states[picks[k]], options.sdp).value;
        });
        for (int i : picks) tr.gme_computed[i] = true;
        for (std::size_t k = 0; k + 1 < picks.size(); ++k) {
            const int a = picks[k], b = picks[k + 1];
            for (int i = a + 1; i < b; ++i) {
                const double w = static_cast<double>(i - a) / (b - a);
                tr.gme[i] = (1.0 - w) * tr.gme[a] + w * tr.gme[b];
            }
        }
    }
    return tr;
}

} // namespace dicke3
