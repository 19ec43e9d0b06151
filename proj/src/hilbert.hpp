#pragma once

// Operator and state algebra for a spin-3/2 collective pseudospin coupled to a
// truncated cavity mode.
//
// Composite basis index convention (used everywhere in the library):
//   index = s * (n_max + 1) + n,  spin index s = 0..3  <->  m = 3/2 - s.
// So s = 0 is m = +3/2 and J_z = diag(3/2, 1/2, -1/2, -3/2).
//
// Three-qubit basis: index = 4*qA + 2*qB + qC with q = 1 meaning the qubit is
// in state "1". The Dicke map sends |m> to the symmetric state with
// k = m + 3/2 qubits in "1".

#include <array>
#include <string>

#include "types.hpp"

namespace dicke3 {

constexpr int spin_dim = 4;
constexpr int qubit_dim = 8;

constexpr int spin_index(int twice_m) { return (3 - twice_m) / 2; }
constexpr int twice_m_of(int spin_idx) { return 3 - 2 * spin_idx; }
constexpr double m_of(int spin_idx) { return 1.5 - spin_idx; }

inline int composite_index(const FockSpace& fock, int spin_idx, int n) {
    return spin_idx * fock.size() + n;
}

struct SpinMatrices {
    RMatrix jz;
    RMatrix jplus;
    RMatrix jminus;
    RMatrix jx;
    CMatrix jy;
};

struct BosonMatrices {
    RMatrix a;
    RMatrix a_dagger;
    RMatrix number;
};

SpinMatrices spin_matrices();

// Hard cutoff: a†|n_max> = 0.
BosonMatrices boson_matrices(const FockSpace& fock);

template <typename DerivedA, typename DerivedB>
auto tensor_lift(const Eigen::MatrixBase<DerivedA>& spin_op, const Eigen::MatrixBase<DerivedB>& fock_op) {
    using Scalar = typename Eigen::ScalarBinaryOpTraits<typename DerivedA::Scalar,
                                                        typename DerivedB::Scalar>::ReturnType;
    const auto rs = spin_op.rows(), cs = spin_op.cols();
    const auto rf = fock_op.rows(), cf = fock_op.cols();
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> out(rs * rf, cs * cf);
    for (Eigen::Index i = 0; i < rs; ++i)
        for (Eigen::Index j = 0; j < cs; ++j)
            out.block(i * rf, j * cf, rf, cf) = Scalar(spin_op(i, j)) * fock_op.template cast<Scalar>();
    return out;
}

// Associated Laguerre polynomial L_n^k(x) by the three-term recurrence.
double laguerre_assoc(int n, int k, double x);

// <m| exp[alpha (a† - a)] |n> for real alpha.
double displaced_fock_overlap(int m, int n, double alpha);

// Matrix D_{kn} = <k| exp[alpha (a† - a)] |n> restricted to the truncated space.
RMatrix displacement_matrix(const FockSpace& fock, double alpha);

// exp(i pi/2 J_y). Maps the original-frame Hamiltonian onto the rotated one:
// V H_original V† = H_rotated, and V|m=-1/2> is the rotated-frame Dicke state.
CMatrix frame_rotation();

bool is_hermitian(const CMatrix& m, double tol);

// Qubit masks for the three-qubit index 4*qA + 2*qB + qC.
constexpr unsigned qubit_a = 4u, qubit_b = 2u, qubit_c = 1u;

// Transpose on the qubits selected by `mask`; no validation beyond the size.
CMatrix partial_transpose_raw(const CMatrix& m, unsigned mask);

// Returns an empty string when `rho` is a valid density matrix within `tol`,
// otherwise a description of the first violated invariant.
std::string density_violation(const CMatrix& rho, double tol = 1e-10, double psd_tol = 1e-9);

enum class DensityBasis { spin, qubits };

class StateVector {
public:
    StateVector(FockSpace fock, CVector amplitudes);

    const FockSpace& fock() const { return fock_; }
    const CVector& amplitudes() const { return amplitudes_; }
    cplx operator()(int spin_idx, int n) const { return amplitudes_(composite_index(fock_, spin_idx, n)); }
    double norm() const { return amplitudes_.norm(); }

    static StateVector product(const FockSpace& fock, const Eigen::Vector4cd& spin, int n);

private:
    FockSpace fock_;
    CVector amplitudes_;
};

class DensityMatrix {
public:
    // Validates Hermiticity, unit trace and positivity; throws invalid_state.
    DensityMatrix(CMatrix entries, DensityBasis basis);

    const CMatrix& matrix() const { return entries_; }
    DensityBasis basis() const { return basis_; }
    int dim() const { return static_cast<int>(entries_.rows()); }

    static DensityMatrix pure(const CVector& psi, DensityBasis basis);

private:
    CMatrix entries_;
    DensityBasis basis_;
};

// 8x4 isometry whose column s is the Dicke image of spin index s.
RMatrix dicke_isometry();

DensityMatrix symmetric_embed(const DensityMatrix& rho4);

// Inverse of symmetric_embed for states supported on the symmetric subspace.
// Throws invalid_state when more than `tol` weight lies outside it.
DensityMatrix symmetric_restrict(const DensityMatrix& rho8, double tol = 1e-9);

} // namespace dicke3
