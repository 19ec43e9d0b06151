#include "sdp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace dicke3 {

namespace {

constexpr double step_fraction = 0.98;

struct LocalConstraint {
    int index;
    std::vector<SparseEntry> entries;
};

// Constraints grouped by the blocks they touch.
std::vector<std::vector<LocalConstraint>> group_by_block(const ConicProgram& prog) {
    std::vector<std::vector<LocalConstraint>> groups(prog.block_sizes.size());
    for (int i = 0; i < prog.num_constraints(); ++i) {
        for (const auto& e : prog.constraints[i].entries) {
            auto& g = groups[e.block];
            if (g.empty() || g.back().index != i) g.push_back({i, {}});
            g.back().entries.push_back(e);
        }
    }
    return groups;
}

double entry_inner(const std::vector<SparseEntry>& entries, const RMatrix& x) {
    double s = 0.0;
    for (const auto& e : entries)
        s += e.row == e.col ? e.value * x(e.row, e.col) : e.value * (x(e.row, e.col) + x(e.col, e.row));
    return s;
}

double inner(const BlockMatrix& a, const BlockMatrix& b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += a[k].cwiseProduct(b[k]).sum();
    return s;
}

double frobenius(const BlockMatrix& a) { return std::sqrt(inner(a, a)); }

BlockMatrix scaled_identity(const std::vector<int>& sizes, double s) {
    BlockMatrix out;
    for (int n : sizes) out.push_back(s * RMatrix::Identity(n, n));
    return out;
}

RMatrix sym(const RMatrix& m) { return 0.5 * (m + m.transpose()); }

// Largest alpha in (0, inf] with x + alpha dx >= 0, given x > 0.
bool max_step(const BlockMatrix& x, const BlockMatrix& dx, double& alpha) {
    alpha = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < x.size(); ++k) {
        Eigen::LLT<RMatrix> llt(x[k]);
        if (llt.info() != Eigen::Success) return false;
        const RMatrix l_inv = llt.matrixL().solve(RMatrix::Identity(x[k].rows(), x[k].cols()));
        const RMatrix w = sym(l_inv * dx[k] * l_inv.transpose());
        Eigen::SelfAdjointEigenSolver<RMatrix> es(w, Eigen::EigenvaluesOnly);
        if (es.info() != Eigen::Success) return false;
        const double lmin = es.eigenvalues().minCoeff();
        if (lmin < 0.0) alpha = std::min(alpha, -1.0 / lmin);
    }
    return true;
}

struct Direction {
    BlockMatrix dx;
    RVector dy;
    BlockMatrix dz;
};

class Solver {
public:
    Solver(const ConicProgram& prog, const SdpOptions& options)
        : prog_(prog), options_(options), groups_(group_by_block(prog)) {
        n_total_ = 0;
        for (int n : prog.block_sizes) n_total_ += n;
    }

    SdpSolution run();

private:
    void initial_point();
    bool factor_schur();
    Direction direction(const BlockMatrix& rc, const RVector& rp, const BlockMatrix& rd) const;

    const ConicProgram& prog_;
    SdpOptions options_;
    std::vector<std::vector<LocalConstraint>> groups_;
    int n_total_{0};

    BlockMatrix x_, z_, z_inv_;
    RVector y_;
    Eigen::LLT<RMatrix> schur_;
    // near the optimum the Schur matrix can lose definiteness to rounding
    Eigen::LDLT<RMatrix> schur_pivoted_;
    bool pivoted_{false};
};

void Solver::initial_point() {
    if (prog_.start) {
        x_ = prog_.start->x;
        y_ = prog_.start->y;
        z_ = prog_.start->z;
        return;
    }
    // trace-scaled identities, y = 0
    const double n = n_total_;
    double xi = std::max(10.0, std::sqrt(n));
    double eta = std::max(10.0, std::sqrt(n));
    eta = std::max(eta, frobenius(prog_.objective));
    for (int i = 0; i < prog_.num_constraints(); ++i) {
        double norm_a = 0.0;
        for (const auto& e : prog_.constraints[i].entries)
            norm_a += (e.row == e.col ? 1.0 : 2.0) * e.value * e.value;
        norm_a = std::sqrt(norm_a);
        xi = std::max(xi, std::sqrt(n) * (1.0 + std::abs(prog_.rhs(i))) / (1.0 + norm_a));
        eta = std::max(eta, norm_a);
    }
    x_ = scaled_identity(prog_.block_sizes, xi);
    z_ = scaled_identity(prog_.block_sizes, eta);
    y_ = RVector::Zero(prog_.num_constraints());
}

bool Solver::factor_schur() {
    const int m = prog_.num_constraints();
    RMatrix schur = RMatrix::Zero(m, m);
    for (std::size_t k = 0; k < groups_.size(); ++k) {
        const RMatrix& x = x_[k];
        const RMatrix& zi = z_inv_[k];
        const int d = static_cast<int>(x.rows());
        RMatrix t(d, d);
        for (const auto& cj : groups_[k]) {
            t.setZero();
            for (const auto& e : cj.entries) {
                t.col(e.col) += e.value * x.col(e.row);
                if (e.row != e.col) t.col(e.row) += e.value * x.col(e.col);
            }
            const RMatrix g = t * zi;
            for (const auto& ci : groups_[k]) schur(ci.index, cj.index) += entry_inner(ci.entries, g);
        }
    }
    schur = sym(schur);
    schur_.compute(schur);
    pivoted_ = schur_.info() != Eigen::Success;
    if (!pivoted_) return true;
    schur_pivoted_.compute(schur);
    return schur_pivoted_.info() == Eigen::Success && schur_pivoted_.vectorD().cwiseAbs().minCoeff() > 0.0;
}

Direction Solver::direction(const BlockMatrix& rc, const RVector& rp, const BlockMatrix& rd) const {
    const std::size_t nb = x_.size();
    BlockMatrix x_rd_zi(nb);
    for (std::size_t k = 0; k < nb; ++k) x_rd_zi[k] = x_[k] * rd[k] * z_inv_[k];
    const RVector rhs = rp - apply_constraints(prog_, rc) + apply_constraints(prog_, x_rd_zi);

    Direction d;
    d.dy = pivoted_ ? RVector(schur_pivoted_.solve(rhs)) : RVector(schur_.solve(rhs));
    const BlockMatrix aty = adjoint_constraints(prog_, d.dy);
    d.dz.resize(nb);
    d.dx.resize(nb);
    for (std::size_t k = 0; k < nb; ++k) {
        d.dz[k] = rd[k] - aty[k];
        d.dx[k] = rc[k] - sym(x_[k] * d.dz[k] * z_inv_[k]);
    }
    return d;
}

SdpSolution Solver::run() {
    SdpSolution sol;
    initial_point();
    const std::size_t nb = prog_.block_sizes.size();
    const double b_norm = prog_.rhs.norm();
    const double c_norm = frobenius(prog_.objective);

    for (int iter = 0;; ++iter) {
        const RVector rp = prog_.rhs - apply_constraints(prog_, x_);
        const BlockMatrix aty = adjoint_constraints(prog_, y_);
        BlockMatrix rd(nb);
        for (std::size_t k = 0; k < nb; ++k) rd[k] = prog_.objective[k] - aty[k] - z_[k];

        sol.primal_objective = inner(prog_.objective, x_);
        sol.dual_objective = prog_.rhs.dot(y_);
        sol.primal_history.push_back(sol.primal_objective);
        sol.dual_history.push_back(sol.dual_objective);
        sol.relative_gap = std::abs(sol.primal_objective - sol.dual_objective) /
                           (1.0 + std::abs(sol.primal_objective) + std::abs(sol.dual_objective));
        sol.primal_residual = rp.norm() / (1.0 + b_norm);
        sol.dual_residual = frobenius(rd) / (1.0 + c_norm);
        sol.iterations = iter;

        if (!std::isfinite(sol.primal_objective) || !std::isfinite(sol.dual_objective)) {
            sol.status = SdpStatus::numerical_failure;
            sol.message = "non-finite objective";
            break;
        }
        if (sol.relative_gap < options_.tol && sol.primal_residual < options_.tol &&
            sol.dual_residual < options_.tol) {
            sol.status = SdpStatus::optimal;
            break;
        }
        if (iter >= options_.max_iter) {
            sol.status = SdpStatus::max_iter;
            sol.message = "iteration limit reached";
            break;
        }

        z_inv_.resize(nb);
        bool ok = true;
        for (std::size_t k = 0; k < nb && ok; ++k) {
            Eigen::LLT<RMatrix> llt(z_[k]);
            ok = llt.info() == Eigen::Success;
            if (ok) z_inv_[k] = sym(llt.solve(RMatrix::Identity(z_[k].rows(), z_[k].cols())));
        }
        if (!ok || !factor_schur()) {
            sol.status = SdpStatus::numerical_failure;
            sol.message = ok ? "Schur complement is singular" : "dual slack lost definiteness";
            break;
        }

        const double mu = inner(x_, z_) / n_total_;

        BlockMatrix rc(nb);
        for (std::size_t k = 0; k < nb; ++k) rc[k] = -x_[k];
        const Direction pred = direction(rc, rp, rd);
        double ap = 0.0, ad = 0.0;
        if (!max_step(x_, pred.dx, ap) || !max_step(z_, pred.dz, ad)) {
            sol.status = SdpStatus::numerical_failure;
            sol.message = "iterate left the cone";
            break;
        }
        ap = std::min(1.0, ap);
        ad = std::min(1.0, ad);
        double mu_aff = 0.0;
        for (std::size_t k = 0; k < nb; ++k)
            mu_aff += ((x_[k] + ap * pred.dx[k]).cwiseProduct(z_[k] + ad * pred.dz[k])).sum();
        mu_aff /= n_total_;
        const double sigma = std::clamp(std::pow(mu_aff / mu, 3.0), 0.0, 1.0);

        for (std::size_t k = 0; k < nb; ++k)
            rc[k] = -x_[k] + sigma * mu * z_inv_[k] - sym(pred.dx[k] * pred.dz[k] * z_inv_[k]);
        const Direction corr = direction(rc, rp, rd);
        if (!max_step(x_, corr.dx, ap) || !max_step(z_, corr.dz, ad)) {
            sol.status = SdpStatus::numerical_failure;
            sol.message = "iterate left the cone";
            break;
        }
        ap = std::min(1.0, step_fraction * ap);
        ad = std::min(1.0, step_fraction * ad);
        if (ap < 1e-12 && ad < 1e-12) {
            sol.status = SdpStatus::numerical_failure;
            sol.message = "step length collapsed";
            break;
        }
        for (std::size_t k = 0; k < nb; ++k) {
            x_[k] = sym(x_[k] + ap * corr.dx[k]);
            z_[k] = sym(z_[k] + ad * corr.dz[k]);
        }
        y_ += ad * corr.dy;
    }

    sol.x = std::move(x_);
    sol.y = std::move(y_);
    sol.z = std::move(z_);
    return sol;
}

void check_structure(const ConicProgram& prog) {
    const std::size_t nb = prog.block_sizes.size();
    if (nb == 0) fail(ErrorCode::invalid_argument, "program has no blocks");
    for (int n : prog.block_sizes)
        if (n <= 0) fail(ErrorCode::invalid_argument, "block sizes must be positive");
    if (prog.objective.size() != nb) fail(ErrorCode::invalid_argument, "objective block count mismatch");
    for (std::size_t k = 0; k < nb; ++k) {
        const RMatrix& c = prog.objective[k];
        if (c.rows() != prog.block_sizes[k] || c.cols() != prog.block_sizes[k])
            fail(ErrorCode::invalid_argument, "objective block " + std::to_string(k) + " has the wrong size");
        if ((c - c.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, c.cwiseAbs().maxCoeff()))
            fail(ErrorCode::invalid_argument, "objective block " + std::to_string(k) + " is not symmetric");
    }
    if (prog.rhs.size() != prog.num_constraints())
        fail(ErrorCode::invalid_argument, "right-hand side length does not match the constraint count");
    if (prog.num_constraints() == 0) fail(ErrorCode::invalid_argument, "program has no constraints");
    for (int i = 0; i < prog.num_constraints(); ++i) {
        for (const auto& e : prog.constraints[i].entries) {
            if (e.block < 0 || e.block >= static_cast<int>(nb) || e.row < 0 || e.col < 0 ||
                e.row >= prog.block_sizes[e.block] || e.col >= prog.block_sizes[e.block])
                fail(ErrorCode::invalid_argument, "constraint " + std::to_string(i) + " has an entry outside its block");
            if (!std::isfinite(e.value)) fail(ErrorCode::invalid_argument, "constraint entries must be finite");
        }
    }
    if (prog.start) {
        const StartPoint& s = *prog.start;
        if (s.x.size() != nb || s.z.size() != nb || s.y.size() != prog.num_constraints())
            fail(ErrorCode::invalid_argument, "start point does not match the program");
    }
}

} // namespace

const char* to_string(SdpStatus status) {
    switch (status) {
    case SdpStatus::optimal: return "optimal";
    case SdpStatus::max_iter: return "max_iter";
    case SdpStatus::numerical_failure: return "numerical_failure";
    }
    return "unknown";
}

RVector apply_constraints(const ConicProgram& prog, const BlockMatrix& x) {
    RVector out(prog.num_constraints());
    for (int i = 0; i < prog.num_constraints(); ++i) {
        double s = 0.0;
        for (const auto& e : prog.constraints[i].entries) {
            const RMatrix& xb = x[e.block];
            s += e.row == e.col ? e.value * xb(e.row, e.col) : e.value * (xb(e.row, e.col) + xb(e.col, e.row));
        }
        out(i) = s;
    }
    return out;
}

BlockMatrix adjoint_constraints(const ConicProgram& prog, const RVector& y) {
    BlockMatrix out;
    for (int n : prog.block_sizes) out.push_back(RMatrix::Zero(n, n));
    for (int i = 0; i < prog.num_constraints(); ++i) {
        if (y(i) == 0.0) continue;
        for (const auto& e : prog.constraints[i].entries) {
            out[e.block](e.row, e.col) += y(i) * e.value;
            if (e.row != e.col) out[e.block](e.col, e.row) += y(i) * e.value;
        }
    }
    return out;
}

void check_program(const ConicProgram& prog, double rank_tol) {
    check_structure(prog);
    std::vector<int> offsets;
    int total = 0;
    for (int n : prog.block_sizes) {
        offsets.push_back(total);
        total += n * n;
    }
    RMatrix a = RMatrix::Zero(total, prog.num_constraints());
    for (int i = 0; i < prog.num_constraints(); ++i) {
        for (const auto& e : prog.constraints[i].entries) {
            const int n = prog.block_sizes[e.block];
            a(offsets[e.block] + e.row * n + e.col, i) += e.value;
            if (e.row != e.col) a(offsets[e.block] + e.col * n + e.row, i) += e.value;
        }
    }
    Eigen::ColPivHouseholderQR<RMatrix> qr(a);
    qr.setThreshold(rank_tol);
    if (qr.rank() < prog.num_constraints()) {
        std::ostringstream os;
        os << "constraints are linearly dependent (rank " << qr.rank() << " of " << prog.num_constraints() << ")";
        fail(ErrorCode::invalid_argument, os.str());
    }
}

SdpSolution solve_sdp(const ConicProgram& prog, const SdpOptions& options) {
    check_structure(prog);
    if (!(options.tol > 0.0) || options.max_iter < 0)
        fail(ErrorCode::invalid_argument, "solver tolerance must be positive and max_iter non-negative");
    Solver solver(prog, options);
    return solver.run();
}

RMatrix hermitian_embed(const CMatrix& h) {
    if (h.rows() != h.cols()) fail(ErrorCode::invalid_argument, "hermitian_embed: matrix must be square");
    if (!is_hermitian(h, 1e-12 * std::max(1.0, h.cwiseAbs().maxCoeff())))
        fail(ErrorCode::invalid_argument, "hermitian_embed: matrix is not Hermitian");
    const Eigen::Index d = h.rows();
    RMatrix out(2 * d, 2 * d);
    out.topLeftCorner(d, d) = h.real();
    out.topRightCorner(d, d) = -h.imag();
    out.bottomLeftCorner(d, d) = h.imag();
    out.bottomRightCorner(d, d) = h.real();
    return out;
}

CMatrix hermitian_extract(const RMatrix& s) {
    if (s.rows() != s.cols() || s.rows() % 2 != 0)
        fail(ErrorCode::invalid_argument, "hermitian_extract: expected an even square matrix");
    const Eigen::Index d = s.rows() / 2;
    const RMatrix re = 0.5 * (s.topLeftCorner(d, d) + s.bottomRightCorner(d, d));
    const RMatrix im = 0.5 * (s.bottomLeftCorner(d, d) - s.topRightCorner(d, d));
    CMatrix out(d, d);
    out.real() = re;
    out.imag() = im;
    return out;
}

namespace {

std::vector<CMatrix> hermitian_basis(int d) {
    std::vector<CMatrix> basis;
    for (int j = 0; j < d; ++j) {
        CMatrix e = CMatrix::Zero(d, d);
        e(j, j) = 1.0;
        basis.push_back(e);
    }
    for (int j = 0; j < d; ++j)
        for (int k = j + 1; k < d; ++k) {
            CMatrix e = CMatrix::Zero(d, d);
            e(j, k) = e(k, j) = 1.0;
            basis.push_back(e);
            CMatrix f = CMatrix::Zero(d, d);
            f(j, k) = cplx(0.0, 1.0);
            f(k, j) = cplx(0.0, -1.0);
            basis.push_back(f);
        }
    return basis;
}

// Adds scale * <h, X_block> in the complex sense, i.e. (scale/2) <embed(h), X>.
void add_term(Constraint& c, int block, const CMatrix& h, double scale) {
    const RMatrix e = hermitian_embed(h);
    for (int r = 0; r < e.rows(); ++r)
        for (int col = r; col < e.cols(); ++col)
            if (e(r, col) != 0.0) c.entries.push_back({block, r, col, 0.5 * scale * e(r, col)});
}

} // namespace

ConicProgram build_gme_program(const CMatrix& rho8) {
    const std::string why = density_violation(rho8);
    if (!why.empty()) fail(ErrorCode::invalid_state, "invalid density matrix: " + why);
    if (rho8.rows() != qubit_dim) fail(ErrorCode::invalid_argument, "GME program needs an 8x8 density matrix");
    using namespace gme_layout;
    const CMatrix rho = 0.5 * (rho8 + rho8.adjoint());
    const int d2 = 2 * qubit_dim;

    ConicProgram prog;
    prog.block_sizes.assign(num_blocks, d2);
    prog.objective.assign(num_blocks, RMatrix::Zero(d2, d2));
    prog.objective[p_block(0)] = 0.5 * hermitian_embed(rho);
    prog.objective[q_block(0)] = 0.5 * hermitian_embed(partial_transpose_raw(rho, party_mask(0)));

    const auto basis = hermitian_basis(qubit_dim);
    std::vector<double> rhs;
    for (int other : {1, 2}) {
        for (const auto& h : basis) {
            Constraint c;
            add_term(c, p_block(0), h, 1.0);
            add_term(c, q_block(0), partial_transpose_raw(h, party_mask(0)), 1.0);
            add_term(c, p_block(other), h, -1.0);
            add_term(c, q_block(other), partial_transpose_raw(h, party_mask(other)), -1.0);
            prog.constraints.push_back(std::move(c));
            rhs.push_back(0.0);
        }
    }
    std::vector<int> diagonal_bounds;
    for (int v = 0; v < 6; ++v) {
        for (std::size_t a = 0; a < basis.size(); ++a) {
            Constraint c;
            add_term(c, v, basis[a], 1.0);
            add_term(c, slack_block(v), basis[a], 1.0);
            if (a < static_cast<std::size_t>(qubit_dim)) diagonal_bounds.push_back(prog.num_constraints());
            prog.constraints.push_back(std::move(c));
            rhs.push_back(basis[a].trace().real());
        }
    }
    prog.rhs = Eigen::Map<RVector>(rhs.data(), static_cast<Eigen::Index>(rhs.size()));

    // Strictly feasible start: every block at I/2 and y = -t on the diagonal
    // bound rows, so Z = C + (t/2) I on the variable blocks.
    StartPoint start;
    start.x.assign(num_blocks, 0.5 * RMatrix::Identity(d2, d2));
    start.y = RVector::Zero(prog.num_constraints());
    const double t = 1.0 + rho.cwiseAbs().rowwise().sum().maxCoeff();
    for (int i : diagonal_bounds) start.y(i) = -t;
    const BlockMatrix aty = adjoint_constraints(prog, start.y);
    for (int k = 0; k < num_blocks; ++k) start.z.push_back(prog.objective[k] - aty[k]);
    prog.start = std::move(start);
    return prog;
}

} // namespace dicke3
