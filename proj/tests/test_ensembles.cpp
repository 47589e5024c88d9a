#include "doctest.h"
#include "oracles.hpp"
#include "scarsim/ensembles.hpp"
#include "scarsim/operators.hpp"
#include "scarsim/propagation.hpp"
#include "scarsim/spectroscopy.hpp"

using namespace scarsim;

TEST_CASE("infinite temperature at the spectral mean") {
    const ConstrainedBasis b = enumerate_basis(10, BoundaryCondition::Periodic);
    const EigDecomposition eig = diagonalize(build_pxp(b, {1.0, 0.7}));
    const RVector d = density_diagonal(b);
    const CanonicalResult r = solve_beta(eig, d, eig.eigenvalues().mean());
    CHECK(std::abs(r.beta) < 1e-9);
    CHECK(r.n_th == doctest::Approx(d.mean()).epsilon(1e-9));
}

TEST_CASE("canonical energy falls with beta and the root reproduces it") {
    const ConstrainedBasis b = enumerate_basis(10, BoundaryCondition::Open);
    const EigDecomposition eig = diagonalize(build_pxp(b, {1.0, -0.5}));
    const RVector nd = eig.diagonal_in_eigenbasis(density_diagonal(b));
    double prev = std::numeric_limits<double>::infinity();
    for (double beta = -3.0; beta <= 3.0; beta += 0.25) {
        const CanonicalResult c = canonical_at(eig.eigenvalues(), nd, beta);
        CHECK(c.mean_energy < prev);
        prev = c.mean_energy;
        const CanonicalResult s = solve_beta(eig.eigenvalues(), nd, c.mean_energy);
        CHECK(s.beta == doctest::Approx(beta).epsilon(1e-8));
        CHECK(s.n_th == doctest::Approx(c.n_th).epsilon(1e-9));
    }
}

TEST_CASE("spectral edges") {
    const ConstrainedBasis b = enumerate_basis(8, BoundaryCondition::Periodic);
    const EigDecomposition eig = diagonalize(build_pxp(b, {1.0, 1.0}));
    const RVector nd = eig.diagonal_in_eigenbasis(density_diagonal(b));
    const double e0 = eig.eigenvalues()[0];
    CHECK_THROWS_AS(solve_beta(eig.eigenvalues(), nd, e0, 1e-12), Error);
    bool edge = false;
    const CanonicalResult c = thermal_value(eig.eigenvalues(), nd, e0, edge);
    CHECK(edge);
    CHECK(c.beta == kBetaCap);
    CHECK(c.n_th == doctest::Approx(nd[0]).epsilon(1e-9));
    thermal_value(eig.eigenvalues(), nd, eig.eigenvalues().mean(), edge);
    CHECK_FALSE(edge);
}

TEST_CASE("diagonal ensemble equals the long-time average") {
    const int n = 10;
    const ConstrainedBasis b = enumerate_basis(n, BoundaryCondition::Periodic);
    const RVector d = density_diagonal(b);
    const CVector psi0 = ground_state(build_pxp(b, {1.0, -1.31})).state;
    const EigDecomposition eig = diagonalize(build_pxp(b, {1.0, 0.6}));
    std::vector<double> times;
    for (double t = 0.0; t <= 2000.0; t += 0.5) times.push_back(t);
    const Eigen::MatrixXcd states = evolve_exact_at(eig, psi0, times);
    double avg = 0.0;
    for (Eigen::Index j = 0; j < states.cols(); ++j) avg += states.col(j).cwiseAbs2().dot(d);
    avg /= static_cast<double>(states.cols());
    const DiagonalEnsemble de = diagonal_ensemble(psi0, eig, d);
    CHECK(de.n_bar == doctest::Approx(avg).epsilon(1e-3));
}

TEST_CASE("degenerate blocks are handled in a basis-independent way") {
    // At mu = 0 the PBC spectrum has a large zero-energy manifold plus +-k pairs.
    const ConstrainedBasis b = enumerate_basis(10, BoundaryCondition::Periodic);
    const RVector d = density_diagonal(b);
    const EigDecomposition eig = diagonalize(build_pxp(b, {1.0, 0.0}));
    const CVector psi0 = z2_state(b);
    const DiagonalEnsemble de = diagonal_ensemble(psi0, eig, d);
    CHECK(de.degenerate_blocks > 0);
    CHECK(de.largest_block > 2);
    // Rotating the eigenbasis inside each cluster must not change the result.
    Eigen::MatrixXd V = eig.real_vectors();
    const RVector& e = eig.eigenvalues();
    for (Eigen::Index s = 0; s < e.size();) {
        Eigen::Index t = s + 1;
        while (t < e.size() && e[t] - e[t - 1] < kDegeneracyTol) ++t;
        if (t - s > 1) {
            Eigen::HouseholderQR<Eigen::MatrixXd> qr(Eigen::MatrixXd::Random(t - s, t - s));
            V.middleCols(s, t - s) = V.middleCols(s, t - s) * Eigen::MatrixXd(qr.householderQ());
        }
        s = t;
    }
    const EigDecomposition rotated(eig.tag(), e, V);
    CHECK(diagonal_ensemble(psi0, rotated, d).n_bar == doctest::Approx(de.n_bar).epsilon(1e-12));
    // Oracle: long-time average from the spectral projectors.
    std::vector<double> times;
    for (double t = 0.0; t <= 3000.0; t += 0.37) times.push_back(t);
    const Eigen::MatrixXcd states = evolve_exact_at(eig, psi0, times);
    double avg = 0.0;
    for (Eigen::Index j = 0; j < states.cols(); ++j) avg += states.col(j).cwiseAbs2().dot(d);
    avg /= static_cast<double>(states.cols());
    CHECK(de.n_bar == doctest::Approx(avg).epsilon(2e-3));
}

TEST_CASE("ensemble gap bookkeeping") {
    const ConstrainedBasis b = enumerate_basis(8, BoundaryCondition::Periodic);
    const RVector d = density_diagonal(b);
    const CVector psi0 = ground_state(build_pxp(b, {1.0, 2.0})).state;
    const EigDecomposition eig = diagonalize(build_pxp(b, {1.0, -1.0}));
    const EnsembleGap g = ensemble_gap(psi0, eig, d);
    CHECK(g.delta_n == doctest::Approx(g.diagonal.n_bar - g.canonical.n_th));
    CHECK(g.e_target == doctest::Approx(build_pxp(b, {1.0, -1.0}).expectation(psi0)));
}
