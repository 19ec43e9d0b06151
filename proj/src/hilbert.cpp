#include "hilbert.hpp"

#include <cmath>
#include <sstream>

namespace dicke3 {

void ModelParams::validate() const {
    if (!std::isfinite(delta) || !std::isfinite(omega) || !std::isfinite(g))
        fail(ErrorCode::invalid_argument, "model parameters must be finite");
    if (omega <= 0.0) fail(ErrorCode::invalid_argument, "omega must be positive");
    if (delta < 0.0) fail(ErrorCode::invalid_argument, "delta must be non-negative");
    if (g < 0.0) fail(ErrorCode::invalid_argument, "g must be non-negative");
    if (!std::isfinite(delta / omega) || !std::isfinite(g / omega))
        fail(ErrorCode::invalid_argument, "delta/omega and g/omega must be finite");
}

const char* to_string(Method method) {
    switch (method) {
    case Method::exact: return "exact";
    case Method::rwa: return "rwa";
    case Method::zeroth: return "zeroth";
    case Method::grwa: return "grwa";
    }
    return "unknown";
}

Method method_from_string(const std::string& name) {
    if (name == "exact") return Method::exact;
    if (name == "rwa") return Method::rwa;
    if (name == "zeroth") return Method::zeroth;
    if (name == "grwa") return Method::grwa;
    fail(ErrorCode::invalid_argument, "unknown method '" + name + "'");
}

SpinMatrices spin_matrices() {
    SpinMatrices s;
    s.jz = RMatrix::Zero(spin_dim, spin_dim);
    s.jplus = RMatrix::Zero(spin_dim, spin_dim);
    for (int i = 0; i < spin_dim; ++i) s.jz(i, i) = m_of(i);
    // J+|m> = sqrt(J(J+1) - m(m+1)) |m+1>; |m+1> sits one index lower.
    for (int i = 1; i < spin_dim; ++i) {
        const double m = m_of(i);
        s.jplus(i - 1, i) = std::sqrt(3.75 - m * (m + 1.0));
    }
    s.jminus = s.jplus.transpose();
    s.jx = 0.5 * (s.jplus + s.jminus);
    s.jy = (s.jplus - s.jminus).cast<cplx>() / cplx(0.0, 2.0);
    return s;
}

BosonMatrices boson_matrices(const FockSpace& fock) {
    if (fock.n_max < 0) fail(ErrorCode::invalid_argument, "n_max must be non-negative");
    const int d = fock.size();
    BosonMatrices b;
    b.a = RMatrix::Zero(d, d);
    for (int n = 1; n < d; ++n) b.a(n - 1, n) = std::sqrt(static_cast<double>(n));
    b.a_dagger = b.a.transpose();
    b.number = RMatrix::Zero(d, d);
    for (int n = 0; n < d; ++n) b.number(n, n) = n;
    return b;
}

double laguerre_assoc(int n, int k, double x) {
    if (n < 0) fail(ErrorCode::invalid_argument, "laguerre_assoc: negative degree");
    if (n == 0) return 1.0;
    double prev = 1.0;
    double cur = 1.0 + k - x;
    for (int j = 1; j < n; ++j) {
        const double next = ((2.0 * j + 1.0 + k - x) * cur - (j + k) * prev) / (j + 1.0);
        prev = cur;
        cur = next;
    }
    return cur;
}

double displaced_fock_overlap(int m, int n, double alpha) {
    if (m < 0 || n < 0) fail(ErrorCode::invalid_argument, "displaced_fock_overlap: negative occupation");
    // <m|D(a)|n> = sqrt(n!/m!) a^(m-n) e^{-a^2/2} L_n^{m-n}(a^2) for m >= n;
    // the m < n case follows from <m|D(a)|n> = <n|D(-a)|m>.
    const int lo = std::min(m, n);
    const int hi = std::max(m, n);
    const double a = (m >= n) ? alpha : -alpha;
    double pref = 1.0;
    for (int j = lo + 1; j <= hi; ++j) pref *= a / std::sqrt(static_cast<double>(j));
    return pref * std::exp(-0.5 * alpha * alpha) * laguerre_assoc(lo, hi - lo, alpha * alpha);
}

RMatrix displacement_matrix(const FockSpace& fock, double alpha) {
    const int d = fock.size();
    RMatrix out(d, d);
    for (int k = 0; k < d; ++k)
        for (int n = 0; n < d; ++n) out(k, n) = displaced_fock_overlap(k, n, alpha);
    return out;
}

CMatrix frame_rotation() {
    const SpinMatrices s = spin_matrices();
    Eigen::SelfAdjointEigenSolver<CMatrix> es(s.jy);
    const double half_pi = std::acos(0.0);
    Eigen::VectorXcd phases(spin_dim);
    for (int i = 0; i < spin_dim; ++i) phases(i) = std::polar(1.0, half_pi * es.eigenvalues()(i));
    return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

bool is_hermitian(const CMatrix& m, double tol) {
    if (m.rows() != m.cols()) return false;
    return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

CMatrix partial_transpose_raw(const CMatrix& m, unsigned mask) {
    if (m.rows() != qubit_dim || m.cols() != qubit_dim) fail(ErrorCode::invalid_argument, "partial transpose needs an 8x8 matrix");
    CMatrix out(qubit_dim, qubit_dim);
    for (unsigned i = 0; i < qubit_dim; ++i)
        for (unsigned j = 0; j < qubit_dim; ++j) {
            const unsigned ip = (i & ~mask) | (j & mask);
            const unsigned jp = (j & ~mask) | (i & mask);
            out(ip, jp) = m(i, j);
        }
    return out;
}

std::string density_violation(const CMatrix& rho, double tol, double psd_tol) {
    std::ostringstream os;
    os.precision(12);
    if (rho.rows() != rho.cols() || rho.rows() == 0) {
        os << "density matrix must be square and non-empty";
        return os.str();
    }
    if (!rho.allFinite()) return "density matrix has non-finite entries";
    const double herm = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
    if (herm > tol) {
        os << "not Hermitian (max |rho - rho^dagger| = " << herm << ")";
        return os.str();
    }
    const double tr = rho.trace().real();
    if (std::abs(tr - 1.0) > tol) {
        os << "trace is " << tr << ", expected 1";
        return os.str();
    }
    const CMatrix sym = 0.5 * (rho + rho.adjoint());
    Eigen::SelfAdjointEigenSolver<CMatrix> es(sym, Eigen::EigenvaluesOnly);
    const double lmin = es.eigenvalues().minCoeff();
    if (lmin < -psd_tol) {
        os << "not positive semidefinite (minimum eigenvalue " << lmin << ")";
        return os.str();
    }
    return {};
}

StateVector::StateVector(FockSpace fock, CVector amplitudes) : fock_(fock), amplitudes_(std::move(amplitudes)) {
    if (amplitudes_.size() != fock_.composite_dim())
        fail(ErrorCode::invalid_argument, "state vector size does not match the composite dimension");
}

StateVector StateVector::product(const FockSpace& fock, const Eigen::Vector4cd& spin, int n) {
    if (n < 0 || n > fock.n_max) fail(ErrorCode::invalid_argument, "Fock index out of range");
    CVector psi = CVector::Zero(fock.composite_dim());
    for (int s = 0; s < spin_dim; ++s) psi(composite_index(fock, s, n)) = spin(s);
    return StateVector(fock, psi);
}

namespace {
int expected_dim(DensityBasis basis) { return basis == DensityBasis::spin ? spin_dim : qubit_dim; }
} // namespace

DensityMatrix::DensityMatrix(CMatrix entries, DensityBasis basis) : entries_(std::move(entries)), basis_(basis) {
    if (entries_.rows() != expected_dim(basis) || entries_.cols() != expected_dim(basis))
        fail(ErrorCode::invalid_argument, "density matrix has the wrong dimension for its basis");
    const std::string why = density_violation(entries_);
    if (!why.empty()) fail(ErrorCode::invalid_state, "invalid density matrix: " + why);
}

DensityMatrix DensityMatrix::pure(const CVector& psi, DensityBasis basis) {
    const CVector v = psi / psi.norm();
    return DensityMatrix(v * v.adjoint(), basis);
}

RMatrix dicke_isometry() {
    RMatrix iso = RMatrix::Zero(qubit_dim, spin_dim);
    for (int s = 0; s < spin_dim; ++s) {
        const int excited = (twice_m_of(s) + 3) / 2; // k = m + 3/2
        int count = 0;
        for (int b = 0; b < qubit_dim; ++b)
            if (__builtin_popcount(static_cast<unsigned>(b)) == excited) ++count;
        for (int b = 0; b < qubit_dim; ++b)
            if (__builtin_popcount(static_cast<unsigned>(b)) == excited) iso(b, s) = 1.0 / std::sqrt(double(count));
    }
    return iso;
}

DensityMatrix symmetric_embed(const DensityMatrix& rho4) {
    if (rho4.basis() != DensityBasis::spin) fail(ErrorCode::invalid_argument, "symmetric_embed expects a spin-sector state");
    const CMatrix iso = dicke_isometry().cast<cplx>();
    return DensityMatrix(iso * rho4.matrix() * iso.adjoint(), DensityBasis::qubits);
}

DensityMatrix symmetric_restrict(const DensityMatrix& rho8, double tol) {
    if (rho8.basis() != DensityBasis::qubits) fail(ErrorCode::invalid_argument, "symmetric_restrict expects a three-qubit state");
    const CMatrix iso = dicke_isometry().cast<cplx>();
    const CMatrix rho4 = iso.adjoint() * rho8.matrix() * iso;
    const double leak = 1.0 - rho4.trace().real();
    if (leak > tol)
        fail(ErrorCode::invalid_state, "state has weight " + std::to_string(leak) + " outside the symmetric subspace");
    return DensityMatrix(rho4, DensityBasis::spin);
}

} // namespace dicke3
