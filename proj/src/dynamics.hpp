#pragma once

#include <array>
#include <vector>

#include "sdp.hpp"
#include "spectrum.hpp"

namespace dicke3 {

// (1/sqrt 8)(-sqrt3 |-3/2> - |-1/2> + |1/2> + sqrt3 |3/2>) (x) |0>, the
// rotated-frame image of the W state with the cavity in vacuum.
StateVector initial_state(const FockSpace& fock);

// Expands psi0 once in the eigenbasis and propagates by phases e^{-iEt}.
class Evolver {
public:
    Evolver(const EigenSystem& eig, const StateVector& psi0);

    StateVector at(double t) const;
    // Weight of psi0 captured by the eigenbasis (1 for a complete basis).
    double captured_weight() const { return coeffs_.squaredNorm(); }

private:
    FockSpace fock_;
    RVector energies_;
    CMatrix vectors_;
    CVector coeffs_;
};

std::vector<StateVector> evolve(const EigenSystem& eig, const StateVector& psi0, const std::vector<double>& times);

// 4x4 spin density after tracing out the cavity (same frame as psi).
CMatrix reduce_spin(const StateVector& psi);

// V† rho V: rotated-frame spin density expressed in the lab frame.
CMatrix to_lab_frame(const CMatrix& rho4);
// (V† (x) 1) psi
StateVector to_lab_frame(const StateVector& psi);

// Partial trace followed by the symmetric embedding (no frame change).
DensityMatrix reduce_to_qubits(const StateVector& psi);

// Diagonal of the spin density, ordered by spin index (m = 3/2 first).
std::array<double, 4> dicke_populations(const CMatrix& rho4);
std::array<double, 4> dicke_populations(const StateVector& psi);

enum class SpinAxis { y, z };

struct SpinMoments {
    double first;  // <S_n>
    double second; // <S_n^2>
};

SpinMoments collective_spin_moments(const CMatrix& rho4, SpinAxis axis);

struct TrajectoryOptions {
    double tmax_scaled{3.0}; // in units of Δt / 2π
    int steps{400};          // intervals; steps + 1 samples
    int gme_stride{4};
    bool compute_gme{true};
    SdpOptions sdp;
    unsigned threads{1};
};

struct Trajectory {
    Method method{Method::exact};
    std::vector<double> times; // Δt / 2π
    std::vector<DensityMatrix> states; // lab-frame three-qubit states
    std::vector<std::array<double, 4>> populations;
    std::vector<double> concurrence;
    std::vector<double> negativity_ab_c;
    std::vector<double> gme;
    std::vector<bool> gme_computed; // false: linearly interpolated (or not computed at all)

    int size() const { return static_cast<int>(times.size()); }
};

Trajectory run_trajectory(const EigenSystem& eig, const TrajectoryOptions& options);

} // namespace dicke3
