#include "doctest.h"

#include <algorithm>

#include "oracles.hpp"
#include "sdp.hpp"

using namespace dicke3;

namespace {

double inner(const BlockMatrix& a, const BlockMatrix& b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += a[k].cwiseProduct(b[k]).sum();
    return s;
}

// maximize -y  s.t.  C + y I >= 0, i.e. the smallest y with y >= lambda_max(-C)
ConicProgram eigenvalue_program(const RMatrix& c) {
    const int d = static_cast<int>(c.rows());
    ConicProgram prog;
    prog.block_sizes = {d};
    prog.objective = {c};
    Constraint a;
    for (int i = 0; i < d; ++i) a.entries.push_back({0, i, i, -1.0});
    prog.constraints = {a};
    prog.rhs = RVector::Constant(1, -1.0);
    return prog;
}

CMatrix pure(const CVector& v) { return v * v.adjoint() / v.squaredNorm(); }

} // namespace

TEST_CASE("hermitian embedding") {
    RMatrix real(2, 2);
    real << 2.0, 1.0, 1.0, -3.0;
    const RMatrix e = hermitian_embed(real.cast<cplx>());
    CHECK((e.topLeftCorner(2, 2) - real).norm() == 0.0);
    CHECK((e.bottomRightCorner(2, 2) - real).norm() == 0.0);
    CHECK(e.topRightCorner(2, 2).norm() == 0.0);

    CMatrix sy(2, 2);
    sy << 0.0, cplx(0.0, 1.0), cplx(0.0, -1.0), 0.0;
    Eigen::SelfAdjointEigenSolver<RMatrix> es(hermitian_embed(sy));
    CHECK((es.eigenvalues() - Eigen::Vector4d(-1, -1, 1, 1)).cwiseAbs().maxCoeff() < 1e-14);

    std::mt19937 rng(1);
    const CMatrix h = oracle::random_hermitian(8, rng);
    const RMatrix he = hermitian_embed(h);
    Eigen::SelfAdjointEigenSolver<CMatrix> eh(h);
    Eigen::SelfAdjointEigenSolver<RMatrix> ee(he);
    for (int i = 0; i < 8; ++i) {
        CHECK(std::abs(ee.eigenvalues()(2 * i) - eh.eigenvalues()(i)) < 1e-12);
        CHECK(std::abs(ee.eigenvalues()(2 * i + 1) - eh.eigenvalues()(i)) < 1e-12);
    }
    CHECK(he.trace() == doctest::Approx(2.0 * h.trace().real()));
    CHECK((hermitian_embed(hermitian_extract(he)) - he).cwiseAbs().maxCoeff() < 1e-14);

    CMatrix bad = h;
    bad(0, 1) += 1e-6;
    CHECK_THROWS_AS(hermitian_embed(bad), Error);
    CHECK_THROWS_AS(hermitian_extract(RMatrix::Zero(3, 3)), Error);
}

TEST_CASE("small programs") {
    SUBCASE("x >= 1 from [[x, 1], [1, x]] >= 0") {
        RMatrix c(2, 2);
        c << 0.0, 1.0, 1.0, 0.0;
        const SdpSolution sol = solve_sdp(eigenvalue_program(c));
        REQUIRE(sol.status == SdpStatus::optimal);
        CHECK(sol.y(0) == doctest::Approx(1.0).epsilon(1e-7));
        CHECK(sol.primal_objective == doctest::Approx(-1.0).epsilon(1e-7));
    }
    SUBCASE("min Tr X with X11 = 1") {
        ConicProgram prog;
        prog.block_sizes = {2};
        prog.objective = {RMatrix::Identity(2, 2)};
        prog.constraints = {Constraint{{{0, 0, 0, 1.0}}}};
        prog.rhs = RVector::Constant(1, 1.0);
        const SdpSolution sol = solve_sdp(prog);
        REQUIRE(sol.status == SdpStatus::optimal);
        CHECK(sol.primal_objective == doctest::Approx(1.0).epsilon(1e-7));
        CHECK(sol.x[0](0, 0) == doctest::Approx(1.0).epsilon(1e-7));
        CHECK(std::abs(sol.x[0](1, 1)) < 1e-7);
    }
    SUBCASE("largest eigenvalue of a random symmetric matrix") {
        std::mt19937 rng(6);
        std::normal_distribution<double> nd;
        RMatrix m(6, 6);
        for (int i = 0; i < 6; ++i)
            for (int j = 0; j < 6; ++j) m(i, j) = nd(rng);
        m = 0.5 * (m + m.transpose()).eval();
        Eigen::SelfAdjointEigenSolver<RMatrix> es(m);
        const SdpSolution sol = solve_sdp(eigenvalue_program(-m));
        REQUIRE(sol.status == SdpStatus::optimal);
        CHECK(std::abs(sol.y(0) - es.eigenvalues().maxCoeff()) < 1e-7);
    }
    SUBCASE("iteration cap is reported") {
        RMatrix c(2, 2);
        c << 0.0, 1.0, 1.0, 0.0;
        SdpOptions opt;
        opt.max_iter = 2;
        CHECK(solve_sdp(eigenvalue_program(c), opt).status == SdpStatus::max_iter);
    }
}

TEST_CASE("constraint operators are adjoint") {
    const ConicProgram prog = build_gme_program(CMatrix::Identity(8, 8) / 8.0);
    std::mt19937 rng(4);
    std::normal_distribution<double> nd;
    BlockMatrix x;
    for (int n : prog.block_sizes) {
        RMatrix r(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) r(i, j) = nd(rng);
        x.push_back(r + r.transpose());
    }
    RVector y(prog.num_constraints());
    for (int i = 0; i < y.size(); ++i) y(i) = nd(rng);
    const double lhs = y.dot(apply_constraints(prog, x));
    const double rhs = inner(adjoint_constraints(prog, y), x);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
}

TEST_CASE("program validation") {
    ConicProgram prog = eigenvalue_program(RMatrix::Identity(3, 3));
    CHECK_NOTHROW(check_program(prog));
    prog.constraints.push_back(prog.constraints[0]);
    prog.rhs = RVector::Constant(2, -1.0);
    CHECK_THROWS_AS(check_program(prog), Error);

    ConicProgram bad = eigenvalue_program(RMatrix::Identity(3, 3));
    bad.constraints[0].entries.push_back({0, 3, 0, 1.0});
    CHECK_THROWS_AS(check_program(bad), Error);
    bad = eigenvalue_program(RMatrix::Identity(3, 3));
    bad.objective[0](0, 1) = 1.0;
    CHECK_THROWS_AS(check_program(bad), Error);
    CHECK_THROWS_AS(solve_sdp(bad), Error);
}

TEST_CASE("GME program structure") {
    CVector w = CVector::Zero(8);
    w(1) = w(2) = w(4) = 1.0;
    const ConicProgram prog = build_gme_program(pure(w));
    CHECK(prog.block_sizes.size() == 12);
    CHECK(std::all_of(prog.block_sizes.begin(), prog.block_sizes.end(), [](int n) { return n == 16; }));
    CHECK(prog.num_constraints() == 512);
    CHECK_NOTHROW(check_program(prog));
    REQUIRE(prog.start.has_value());

    // the starting point is strictly feasible
    const RVector ax = apply_constraints(prog, prog.start->x);
    CHECK((ax - prog.rhs).cwiseAbs().maxCoeff() < 1e-12);
    for (const auto& z : prog.start->z) {
        Eigen::SelfAdjointEigenSolver<RMatrix> es(z);
        CHECK(es.eigenvalues().minCoeff() > 0.0);
    }

    CMatrix not_density = CMatrix::Identity(8, 8);
    CHECK_THROWS_AS(build_gme_program(not_density), Error);
    CHECK_THROWS_AS(build_gme_program(CMatrix::Identity(4, 4) / 4.0), Error);
}

TEST_CASE("GME program: duality, optimality and determinism") {
    CVector w = CVector::Zero(8);
    w(1) = w(2) = w(4) = 1.0;
    const ConicProgram prog = build_gme_program(pure(w));
    const SdpSolution a = solve_sdp(prog);
    REQUIRE(a.status == SdpStatus::optimal);
    REQUIRE(a.primal_history.size() == a.dual_history.size());
    for (std::size_t k = 0; k < a.primal_history.size(); ++k) CHECK(a.primal_history[k] >= a.dual_history[k] - 1e-9);

    CHECK(a.relative_gap < 1e-8);
    const RVector ax = apply_constraints(prog, a.x);
    for (int i = 0; i < ax.size(); ++i) CHECK(std::abs(ax(i) - prog.rhs(i)) < 1e-7 * (1.0 + std::abs(prog.rhs(i))));
    for (std::size_t k = 0; k < a.x.size(); ++k) {
        Eigen::SelfAdjointEigenSolver<RMatrix> ex(a.x[k]), ez(a.z[k]);
        CHECK(ex.eigenvalues().minCoeff() > -1e-9);
        CHECK(ez.eigenvalues().minCoeff() > -1e-9);
    }
    CHECK(-a.primal_objective == doctest::Approx(0.4428090415755358).epsilon(1e-6));

    const SdpSolution b = solve_sdp(prog);
    CHECK(a.iterations == b.iterations);
    CHECK(a.primal_objective == b.primal_objective);
    for (std::size_t k = 0; k < a.x.size(); ++k) CHECK((a.x[k] - b.x[k]).cwiseAbs().maxCoeff() == 0.0);

    // the maximally mixed state is fully separable
    const SdpSolution mixed = solve_sdp(build_gme_program(CMatrix::Identity(8, 8) / 8.0));
    REQUIRE(mixed.status == SdpStatus::optimal);
    CHECK(mixed.primal_objective > -1e-7);
}
