#include "spectrum.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "parallel.hpp"

namespace dicke3 {

namespace {

template <typename Matrix>
void check_converged(const Eigen::SelfAdjointEigenSolver<Matrix>& es, const Matrix& m) {
    if (es.info() != Eigen::Success) {
        std::ostringstream os;
        os << "eigensolver did not converge (size " << m.rows() << ", max |entry| "
           << m.cwiseAbs().maxCoeff() << ")";
        fail(ErrorCode::solver_failure, os.str());
    }
}

HermitianEig real_symmetric_eig(const RMatrix& m) {
    Eigen::SelfAdjointEigenSolver<RMatrix> es(m);
    check_converged(es, m);
    return {es.eigenvalues(), es.eigenvectors().cast<cplx>()};
}

// Displacement D(-g m / ω) for each spin index.
std::array<RMatrix, spin_dim> unshift_maps(const ModelParams& params, const FockSpace& fock) {
    std::array<RMatrix, spin_dim> maps;
    for (int s = 0; s < spin_dim; ++s)
        maps[s] = displacement_matrix(fock, -params.g * m_of(s) / params.omega);
    return maps;
}

// Maps a displaced-frame vector (rows: spin index, cols: photon number) to the
// rotated frame by U† = exp[-(g/ω) Jz (a† - a)].
CVector to_rotated_frame(const Eigen::Matrix<double, spin_dim, Eigen::Dynamic>& coeffs,
                         const std::array<RMatrix, spin_dim>& maps, const FockSpace& fock) {
    CVector out(fock.composite_dim());
    for (int s = 0; s < spin_dim; ++s)
        out.segment(s * fock.size(), fock.size()) = (maps[s] * coeffs.row(s).transpose()).cast<cplx>();
    return out;
}

struct Level {
    double energy;
    CVector vector;
    double tail;
};

EigenSystem pack(Method method, const ModelParams& params, const FockSpace& fock, std::vector<Level> levels) {
    std::stable_sort(levels.begin(), levels.end(), [](const Level& a, const Level& b) { return a.energy < b.energy; });
    EigenSystem sys;
    sys.method = method;
    sys.params = params;
    sys.fock = fock;
    const int d = static_cast<int>(levels.size());
    sys.energies.resize(d);
    sys.vectors.resize(fock.composite_dim(), d);
    sys.tail_mass.resize(d);
    for (int j = 0; j < d; ++j) {
        sys.energies(j) = levels[j].energy;
        sys.vectors.col(j) = levels[j].vector;
        sys.tail_mass(j) = levels[j].tail;
    }
    return sys;
}

// Block rows are ascending m; spin index s runs over descending m.
int ascending_row_to_spin(int row) { return spin_dim - 1 - row; }

EigenSystem solve_exact(const ModelParams& params, const FockSpace& fock) {
    const HermitianEig eig = real_symmetric_eig(build_full(params, fock, Frame::rotated));
    EigenSystem sys;
    sys.method = Method::exact;
    sys.params = params;
    sys.fock = fock;
    sys.energies = eig.values;
    sys.vectors = eig.vectors;
    sys.tail_mass = RVector::Zero(eig.values.size());
    return sys;
}

EigenSystem solve_rwa(const ModelParams& params, const FockSpace& fock) {
    const auto blocks = rwa_blocks(params, fock);
    const CMatrix v = frame_rotation();
    std::vector<Level> levels;
    levels.reserve(fock.composite_dim());
    for (const auto& block : blocks) {
        Eigen::SelfAdjointEigenSolver<RMatrix> es(block.matrix);
        check_converged(es, block.matrix);
        for (int j = 0; j < block.size(); ++j) {
            // original-frame spin amplitudes per photon number, then V ⊗ 1
            CVector psi = CVector::Zero(fock.composite_dim());
            for (int r = 0; r < block.size(); ++r) {
                const int s_orig = spin_index(block.labels[r].twice_m);
                const int n = block.labels[r].n;
                for (int s = 0; s < spin_dim; ++s)
                    psi(composite_index(fock, s, n)) += v(s, s_orig) * es.eigenvectors()(r, j);
            }
            levels.push_back({es.eigenvalues()(j), std::move(psi), 0.0});
        }
    }
    return pack(Method::rwa, params, fock, std::move(levels));
}

EigenSystem solve_zeroth(const ModelParams& params, const FockSpace& fock) {
    params.validate();
    const auto maps = unshift_maps(params, fock);
    std::vector<Level> levels;
    levels.reserve(fock.composite_dim());
    for (int n = 0; n <= fock.n_max; ++n) {
        const ZerothCoefficients z = zeroth_coefficients(n, params);
        for (int i = 0; i < 4; ++i) {
            Eigen::Matrix<double, spin_dim, Eigen::Dynamic> coeffs =
                Eigen::Matrix<double, spin_dim, Eigen::Dynamic>::Zero(spin_dim, fock.size());
            for (int row = 0; row < 4; ++row) coeffs(ascending_row_to_spin(row), n) = z.vectors[i](row);
            CVector psi = to_rotated_frame(coeffs, maps, fock);
            const double tail = std::max(0.0, 1.0 - psi.squaredNorm());
            levels.push_back({z.epsilon[i], std::move(psi), tail});
        }
    }
    return pack(Method::zeroth, params, fock, std::move(levels));
}

EigenSystem solve_grwa(const ModelParams& params, const FockSpace& fock) {
    const auto [blocks, coeffs] = grwa_blocks(params, fock);
    const auto maps = unshift_maps(params, fock);
    std::vector<Level> levels;
    levels.reserve(fock.composite_dim());
    for (const auto& block : blocks) {
        Eigen::SelfAdjointEigenSolver<RMatrix> es(block.matrix);
        check_converged(es, block.matrix);
        for (int j = 0; j < block.size(); ++j) {
            Eigen::Matrix<double, spin_dim, Eigen::Dynamic> coeffs_u =
                Eigen::Matrix<double, spin_dim, Eigen::Dynamic>::Zero(spin_dim, fock.size());
            for (int r = 0; r < block.size(); ++r) {
                const int level = (block.labels[r].twice_m + 5) / 2;
                const int p = block.labels[r].n;
                for (int row = 0; row < 4; ++row)
                    coeffs_u(ascending_row_to_spin(row), p) += es.eigenvectors()(r, j) * coeffs.S(row, level - 1);
            }
            CVector psi = to_rotated_frame(coeffs_u, maps, fock);
            const double tail = std::max(0.0, 1.0 - psi.squaredNorm());
            levels.push_back({es.eigenvalues()(j), std::move(psi), tail});
        }
    }
    return pack(Method::grwa, params, fock, std::move(levels));
}

RVector sorted_block_energies(const std::vector<BlockHamiltonian>& blocks) {
    std::vector<double> all;
    for (const auto& block : blocks) {
        Eigen::SelfAdjointEigenSolver<RMatrix> es(block.matrix, Eigen::EigenvaluesOnly);
        check_converged(es, block.matrix);
        for (int j = 0; j < block.size(); ++j) all.push_back(es.eigenvalues()(j));
    }
    std::sort(all.begin(), all.end());
    return Eigen::Map<RVector>(all.data(), static_cast<Eigen::Index>(all.size()));
}

} // namespace

HermitianEig dense_hermitian_eig(const CMatrix& m) {
    if (m.rows() != m.cols()) fail(ErrorCode::invalid_argument, "matrix must be square");
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    if (!is_hermitian(m, 1e-10 * scale)) fail(ErrorCode::invalid_argument, "matrix is not Hermitian");
    const CMatrix h = 0.5 * (m + m.adjoint());
    Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
    check_converged(es, h);
    return {es.eigenvalues(), es.eigenvectors()};
}

EigenSystem solve(Method method, const ModelParams& params, const FockSpace& fock) {
    params.validate();
    if (fock.n_max < 3) fail(ErrorCode::invalid_argument, "n_max must be at least 3");
    switch (method) {
    case Method::exact: return solve_exact(params, fock);
    case Method::rwa: return solve_rwa(params, fock);
    case Method::zeroth: return solve_zeroth(params, fock);
    case Method::grwa: return solve_grwa(params, fock);
    }
    fail(ErrorCode::invalid_argument, "unknown method");
}

RVector solve_energies(Method method, const ModelParams& params, const FockSpace& fock) {
    params.validate();
    if (fock.n_max < 3) fail(ErrorCode::invalid_argument, "n_max must be at least 3");
    switch (method) {
    case Method::exact: {
        const RMatrix h = build_full(params, fock, Frame::rotated);
        Eigen::SelfAdjointEigenSolver<RMatrix> es(h, Eigen::EigenvaluesOnly);
        check_converged(es, h);
        return es.eigenvalues();
    }
    case Method::rwa: return sorted_block_energies(rwa_blocks(params, fock));
    case Method::zeroth: {
        std::vector<double> all;
        for (int n = 0; n <= fock.n_max; ++n)
            for (double e : zeroth_coefficients(n, params).epsilon) all.push_back(e);
        std::sort(all.begin(), all.end());
        return Eigen::Map<RVector>(all.data(), static_cast<Eigen::Index>(all.size()));
    }
    case Method::grwa: return sorted_block_energies(grwa_blocks(params, fock).first);
    }
    fail(ErrorCode::invalid_argument, "unknown method");
}

bool LevelTable::ok() const {
    return std::all_of(failures.begin(), failures.end(), [](const std::string& f) { return f.empty(); });
}

LevelTable level_sweep(const std::vector<Method>& methods, const ModelParams& params_template,
                       const std::vector<double>& g_grid, int k_levels, const FockSpace& fock, unsigned threads) {
    if (g_grid.empty()) fail(ErrorCode::invalid_argument, "g grid is empty");
    if (k_levels <= 0 || k_levels > fock.composite_dim())
        fail(ErrorCode::invalid_argument, "k_levels must be in 1..4(n_max+1)");

    LevelTable table;
    table.g_values = g_grid;
    table.methods.push_back(Method::exact);
    for (Method m : methods)
        if (std::find(table.methods.begin(), table.methods.end(), m) == table.methods.end())
            table.methods.push_back(m);
    table.k_levels = k_levels;
    table.energies.assign(g_grid.size() * table.methods.size() * k_levels, 0.0);
    table.failures.assign(g_grid.size(), {});

    parallel_for(g_grid.size(), threads, [&](std::size_t gi) {
        ModelParams p = params_template;
        p.g = g_grid[gi];
        try {
            for (std::size_t mi = 0; mi < table.methods.size(); ++mi) {
                const RVector e = solve_energies(table.methods[mi], p, fock);
                for (int l = 0; l < k_levels; ++l)
                    table.energies[(gi * table.methods.size() + mi) * k_levels + l] = e(l);
            }
        } catch (const std::exception& ex) {
            std::ostringstream os;
            os << "g = " << p.g << ": " << ex.what();
            table.failures[gi] = os.str();
        }
    });
    return table;
}

} // namespace dicke3
