#include <Eigen/Eigenvalues>

#include "doctest.h"
#include "oracles.hpp"
#include "scarsim/linalg.hpp"
#include "scarsim/operators.hpp"
#include "scarsim/spectroscopy.hpp"

using namespace scarsim;

TEST_CASE("dense diagonalization reproduces the oracle spectrum") {
    const ConstrainedBasis b = enumerate_basis(10, BoundaryCondition::Open);
    const EigDecomposition eig = diagonalize(build_pxp(b, {1.0, 0.9}));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ref(oracle::brute_hamiltonian(10, false, 0.9));
    CHECK((eig.eigenvalues() - ref.eigenvalues()).norm() < 1e-11);
    CHECK(eig.is_real());
    const CVector psi = oracle::random_state(static_cast<Eigen::Index>(b.size()), 11);
    CHECK((eig.reconstruct(eig.coefficients(psi)) - psi).norm() < 1e-12);
}

TEST_CASE("complex sector decomposition") {
    auto basis = std::make_shared<const ConstrainedBasis>(enumerate_basis(10, BoundaryCondition::Periodic));
    const SparseOperator H = build_pxp(build_sector(basis, 2, Parity::None), {1.0, 0.2});
    const EigDecomposition eig = diagonalize(H);
    CHECK_FALSE(eig.is_real());
    for (std::size_t j = 0; j < eig.dim(); j += 7) {
        const CVector v = eig.eigenvector(j);
        CHECK((H.apply(v) - eig.eigenvalues()[static_cast<Eigen::Index>(j)] * v).norm() < 1e-10);
    }
}

TEST_CASE("Lanczos lowest eigenpairs agree with dense results beyond the dense cutoff") {
    const ConstrainedBasis b = enumerate_basis(16, BoundaryCondition::Periodic);
    const SparseOperator H = build_pxp(b, {1.0, 0.3});
    const EigenPairs pairs = lowest_eigenpairs(H, 4, 1e-10);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ref(H.dense_real(), Eigen::EigenvaluesOnly);
    for (int j = 0; j < 4; ++j) {
        CHECK(pairs.values[j] == doctest::Approx(ref.eigenvalues()[j]).epsilon(1e-9));
        CHECK(pairs.residuals[static_cast<std::size_t>(j)] <= 1e-10);
    }
}

TEST_CASE("Lanczos on a complex sector") {
    auto basis = std::make_shared<const ConstrainedBasis>(enumerate_basis(20, BoundaryCondition::Periodic));
    const SparseOperator H = build_pxp(build_sector(basis, 1, Parity::None), {1.0, -0.5});
    REQUIRE(H.dim() > 400);
    const EigenPairs pairs = lowest_eigenpairs(H, 3, 1e-10);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> ref(H.dense(), Eigen::EigenvaluesOnly);
    for (int j = 0; j < 3; ++j) CHECK(pairs.values[j] == doctest::Approx(ref.eigenvalues()[j]).epsilon(1e-9));
}

TEST_CASE("ground state phase convention") {
    const ConstrainedBasis b = enumerate_basis(12, BoundaryCondition::Periodic);
    const GroundState gs = ground_state(build_pxp(b, {1.0, 2.0}));
    Eigen::Index imax = 0;
    gs.state.cwiseAbs().maxCoeff(&imax);
    CHECK(std::abs(gs.state[imax].imag()) < 1e-14);
    CHECK(gs.state[imax].real() > 0.0);
    CHECK(gs.state.norm() == doctest::Approx(1.0));
}

TEST_CASE("ground state limits") {
    const ConstrainedBasis b = enumerate_basis(10, BoundaryCondition::Periodic);
    // Large positive mu: polarized; large negative mu: the symmetric Neel superposition.
    const GroundState up = ground_state(build_pxp(b, {1.0, 60.0}));
    CHECK(std::norm(polarized_state(b).dot(up.state)) > 0.99);
    const GroundState down = ground_state(build_pxp(b, {1.0, -60.0}));
    CHECK(std::norm(zplus_state(b).dot(down.state)) > 0.99);
    // mu = 0 at N = 2 PBC: states 00, 01, 10 with H coupling 00 to both; lowest level -sqrt(2).
    const ConstrainedBasis two = enumerate_basis(2, BoundaryCondition::Periodic);
    CHECK(ground_state(build_pxp(two, {1.0, 0.0})).energy == doctest::Approx(-std::sqrt(2.0)));
}
