#include "doctest.h"
#include "oracles.hpp"
#include "scarsim/operators.hpp"
#include "scarsim/propagation.hpp"

using namespace scarsim;

TEST_CASE("time grid") {
    const TimeGrid g{0.0, 1.0, 0.3};
    const auto pts = g.points();
    REQUIRE(pts.size() == 5);
    CHECK(pts.back() == 1.0);
    CHECK(pts[3] == doctest::Approx(0.9));
    CHECK(TimeGrid{0.0, 20.0, 0.05}.points().size() == 401);
    CHECK_THROWS_AS((TimeGrid{0.0, 1.0, 0.0}.validate()), Error);
    CHECK_THROWS_AS((TimeGrid{1.0, 0.0, 0.1}.validate()), Error);
}

TEST_CASE("Krylov propagation matches spectral propagation") {
    const ConstrainedBasis b = enumerate_basis(12, BoundaryCondition::Periodic);
    const SparseOperator H = build_pxp(b, {1.0, -0.76});
    const EigDecomposition eig = diagonalize(H);
    const CVector psi0 = oracle::random_state(static_cast<Eigen::Index>(b.size()), 21);
    for (double t : {0.1, 1.0, 5.0, 17.3}) {
        KrylovStats stats;
        const CVector kr = evolve_krylov(H, psi0, t, 1e-10, &stats);
        const Eigen::MatrixXcd ex = evolve_exact_at(eig, psi0, {t});
        CAPTURE(t);
        CHECK((kr - ex.col(0)).norm() < 1e-9);
        CHECK(kr.norm() == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(stats.matvecs > 0);
    }
}

TEST_CASE("evolution conserves energy and reverses in time") {
    const ConstrainedBasis b = enumerate_basis(14, BoundaryCondition::Open);
    const SparseOperator H = build_pxp(b, {1.0, 0.6});
    const CVector psi0 = z2_state(b);
    const CVector psi = evolve_krylov(H, psi0, 6.0);
    CHECK(H.expectation(psi) == doctest::Approx(H.expectation(psi0)).epsilon(1e-9));
    const CVector back = evolve_krylov(H, psi, -6.0);
    CHECK((back - psi0).norm() < 1e-8);
}

TEST_CASE("real Hamiltonian: conjugation reverses time") {
    const ConstrainedBasis b = enumerate_basis(10, BoundaryCondition::Periodic);
    const SparseOperator H = build_pxp(b, {1.0, 1.1});
    const CVector psi0 = oracle::random_state(static_cast<Eigen::Index>(b.size()), 2);
    const CVector a = evolve_krylov(H, psi0, 2.5).conjugate();
    const CVector c = evolve_krylov(H, CVector(psi0.conjugate()), -2.5);
    CHECK((a - c).norm() < 1e-9);
}

TEST_CASE("exact evolution series") {
    const ConstrainedBasis b = enumerate_basis(8, BoundaryCondition::Periodic);
    const EigDecomposition eig = diagonalize(build_pxp(b, {1.0, 0.0}));
    const auto states = evolve_exact(eig, z2_state(b), {0.0, 2.0, 0.5});
    REQUIRE(states.size() == 5);
    CHECK((states[0] - z2_state(b)).norm() < 1e-12);
    const auto direct = evolve_exact_at(eig, z2_state(b), {2.0});
    CHECK((states[4] - direct.col(0)).norm() < 1e-12);
}

TEST_CASE("time-dependent evolution with a constant schedule") {
    const ConstrainedBasis b = enumerate_basis(10, BoundaryCondition::Periodic);
    const AffineHamiltonian Ha = make_affine(b);
    const CVector psi0 = polarized_state(b);
    const CVector fixed = evolve_krylov(build_pxp(b, {1.0, 0.8}), psi0, 1.0);
    const CVector sched = evolve_time_dependent([](double) { return 0.8; }, Ha, psi0, {0.0, 1.0, 0.01}, 1e-10);
    CHECK((fixed - sched).norm() < 1e-8);
    const CVector same = evolve_time_dependent([](double) { return 0.8; }, Ha, psi0, {0.0, 0.0, 0.01});
    CHECK((same - psi0).norm() == 0.0);
    CHECK_THROWS_AS(evolve_time_dependent([](double) { return std::nan(""); }, Ha, psi0, {0.0, 1.0, 0.1}), Error);
}

TEST_CASE("time-dependent evolution converges with the step") {
    const ConstrainedBasis b = enumerate_basis(8, BoundaryCondition::Periodic);
    const AffineHamiltonian Ha = make_affine(b);
    auto mu = [](double t) { return 2.0 * std::cos(t); };
    const CVector psi0 = polarized_state(b);
    const CVector coarse = evolve_time_dependent(mu, Ha, psi0, {0.0, 2.0, 0.02}, 1e-11);
    const CVector fine = evolve_time_dependent(mu, Ha, psi0, {0.0, 2.0, 0.01}, 1e-11);
    const CVector finer = evolve_time_dependent(mu, Ha, psi0, {0.0, 2.0, 0.005}, 1e-11);
    const double e1 = (coarse - finer).norm(), e2 = (fine - finer).norm();
    // Midpoint rule: halving the step cuts the error by about four.
    CHECK(e1 / e2 > 3.0);
    CHECK(e2 < 1e-4);
}
