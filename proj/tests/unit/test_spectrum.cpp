#include "doctest.h"

#include "oracles.hpp"
#include "spectrum.hpp"

using namespace dicke3;

namespace {

constexpr Method all_methods[] = {Method::exact, Method::rwa, Method::zeroth, Method::grwa};

double residual(const RMatrix& h, const EigenSystem& sys, int level) {
    const CVector v = sys.vectors.col(level);
    return (h.cast<cplx>() * v - sys.energies(level) * v).norm();
}

} // namespace

TEST_CASE("dense Hermitian eigensolver") {
    CMatrix sy(2, 2);
    sy << 0.0, cplx(0.0, -1.0), cplx(0.0, 1.0), 0.0;
    const HermitianEig e = dense_hermitian_eig(sy);
    CHECK(e.values(0) == doctest::Approx(-1.0).epsilon(1e-15));
    CHECK(e.values(1) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK((sy * e.vectors - e.vectors * e.values.cast<cplx>().asDiagonal()).norm() < 1e-14);

    CMatrix bad = sy;
    bad(0, 1) = 1.0;
    CHECK_THROWS_AS(dense_hermitian_eig(bad), Error);
    CHECK_THROWS_AS(dense_hermitian_eig(CMatrix::Zero(2, 3)), Error);

    std::mt19937 rng(3);
    const CMatrix h = oracle::random_hermitian(9, rng);
    const HermitianEig r = dense_hermitian_eig(h);
    CHECK((r.vectors.adjoint() * r.vectors - CMatrix::Identity(9, 9)).norm() < 1e-12);
    CHECK((h * r.vectors - r.vectors * r.values.cast<cplx>().asDiagonal()).norm() < 1e-11);
    for (int i = 1; i < 9; ++i) CHECK(r.values(i) >= r.values(i - 1));
}

TEST_CASE("exact eigensystem") {
    const FockSpace fock{30};
    const ModelParams p{1.0, 1.0, 0.3};
    const EigenSystem sys = solve(Method::exact, p, fock);
    REQUIRE(sys.size() == fock.composite_dim());
    const RMatrix h = oracle::rotated_hamiltonian(1.0, 1.0, 0.3, 30);
    for (int l = 0; l < sys.size(); l += 7) CHECK(residual(h, sys, l) < 1e-10);
    CHECK((sys.vectors.adjoint() * sys.vectors - CMatrix::Identity(sys.size(), sys.size())).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(sys.tail_mass.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("RWA eigensystem in the rotated frame") {
    const FockSpace fock{20};
    const ModelParams p{1.0, 1.0, 0.2};
    const EigenSystem sys = solve(Method::rwa, p, fock);
    REQUIRE(sys.size() == fock.composite_dim());

    // V (x) 1 applied to the lab-frame RWA operator
    const SpinMatrices s = spin_matrices();
    const BosonMatrices b = boson_matrices(fock);
    const RMatrix id_f = RMatrix::Identity(fock.size(), fock.size());
    const RMatrix lab = -p.delta * tensor_lift(s.jz, id_f) + p.omega * tensor_lift(RMatrix::Identity(4, 4), b.number) +
                        0.5 * p.g * (tensor_lift(s.jminus, b.a_dagger) + tensor_lift(s.jplus, b.a));
    const CMatrix vv = oracle::kron(frame_rotation(), CMatrix::Identity(fock.size(), fock.size()));
    const CMatrix rotated = vv * lab.cast<cplx>() * vv.adjoint();
    for (int l = 0; l < sys.size(); ++l) {
        const CVector v = sys.vectors.col(l);
        CHECK((rotated * v - sys.energies(l) * v).norm() < 1e-10);
    }
    CHECK((sys.vectors.adjoint() * sys.vectors - CMatrix::Identity(sys.size(), sys.size())).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("displaced-frame methods map back to the rotated frame") {
    const FockSpace fock{60};
    SUBCASE("zero splitting: both are exact eigenvectors") {
        const ModelParams p{0.0, 1.0, 0.7};
        const RMatrix h = oracle::rotated_hamiltonian(0.0, 1.0, 0.7, 60);
        for (Method m : {Method::zeroth, Method::grwa}) {
            const EigenSystem sys = solve(m, p, fock);
            for (int l = 0; l < 24; ++l) {
                CHECK(residual(h, sys, l) < 1e-9);
                CHECK(sys.tail_mass(l) < 1e-12);
            }
        }
    }
    SUBCASE("low levels are orthonormal up to truncation") {
        const ModelParams p{1.0, 1.0, 0.3};
        for (Method m : {Method::zeroth, Method::grwa}) {
            const EigenSystem sys = solve(m, p, fock);
            const CMatrix low = sys.vectors.leftCols(40);
            CHECK((low.adjoint() * low - CMatrix::Identity(40, 40)).cwiseAbs().maxCoeff() < 1e-10);
            // the top of the ladder leaks past the cutoff
            CHECK(sys.tail_mass.maxCoeff() > 1e-3);
        }
    }
}

TEST_CASE("energies-only path agrees with the full solve") {
    const FockSpace fock{25};
    for (Method m : all_methods)
        for (double g : {0.0, 0.15, 0.6}) {
            const ModelParams p{0.5, 1.0, g};
            const RVector full = solve(m, p, fock).energies;
            const RVector fast = solve_energies(m, p, fock);
            CHECK((full - fast).cwiseAbs().maxCoeff() < 1e-12);
        }
    CHECK_THROWS_AS(solve(Method::exact, ModelParams{}, FockSpace{2}), Error);
}

TEST_CASE("decoupled spectra coincide for every method") {
    const FockSpace fock{40};
    const ModelParams p{0.9, 1.0, 0.0};
    const RVector ref = solve_energies(Method::exact, p, fock);
    for (Method m : all_methods) CHECK((solve_energies(m, p, fock) - ref).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("truncation convergence of the exact spectrum") {
    const ModelParams p{1.0, 1.0, 0.1};
    const RVector e40 = solve_energies(Method::exact, p, FockSpace{40});
    const RVector e80 = solve_energies(Method::exact, p, FockSpace{80});
    CHECK((e40.head(12) - e80.head(12)).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("level sweep") {
    const FockSpace fock{20};
    const ModelParams tmpl{1.0, 1.0, 0.0};
    const std::vector<double> grid{0.0, 0.1, 0.2};
    const LevelTable t = level_sweep({Method::grwa, Method::exact, Method::grwa}, tmpl, grid, 6, fock, 2);
    REQUIRE(t.methods.size() == 2);
    CHECK(t.methods[0] == Method::exact);
    CHECK(t.methods[1] == Method::grwa);
    CHECK(t.ok());
    for (std::size_t gi = 0; gi < grid.size(); ++gi) {
        const ModelParams p{1.0, 1.0, grid[gi]};
        const RVector ex = solve_energies(Method::exact, p, fock);
        const RVector gr = solve_energies(Method::grwa, p, fock);
        for (int l = 0; l < 6; ++l) {
            CHECK(t.at(gi, 0, l) == ex(l));
            CHECK(t.at(gi, 1, l) == gr(l));
        }
    }

    const LevelTable bad = level_sweep({Method::zeroth}, tmpl, {0.1, -0.2, 0.3}, 4, fock);
    CHECK_FALSE(bad.ok());
    CHECK(bad.failures[0].empty());
    CHECK(bad.failures[1].find("g = -0.2") == 0);
    CHECK(bad.failures[2].empty());

    CHECK_THROWS_AS(level_sweep({Method::exact}, tmpl, {}, 4, fock), Error);
    CHECK_THROWS_AS(level_sweep({Method::exact}, tmpl, grid, 0, fock), Error);
}
