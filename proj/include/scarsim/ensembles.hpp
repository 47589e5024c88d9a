#pragma once

#include "scarsim/linalg.hpp"

namespace scarsim {

struct CanonicalResult {
    double beta = 0.0;
    double n_th = 0.0;
    double mean_energy = 0.0;
};

constexpr double kBetaCap = 50.0;
constexpr double kDegeneracyTol = 1e-10;

// energies and n_diag are the spectrum and the density operator's diagonal in the same eigenbasis.
CanonicalResult canonical_at(const RVector& energies, const RVector& n_diag, double beta);
CanonicalResult solve_beta(const RVector& energies, const RVector& n_diag, double e_target, double tol = 1e-12);
CanonicalResult solve_beta(const EigDecomposition& eig, const RVector& density_diag, double e_target,
                           double tol = 1e-12);

// Like solve_beta, but a target outside the reachable range [E(50), E(-50)] is clamped to beta = +-50
// and reported through at_edge instead of throwing.
CanonicalResult thermal_value(const RVector& energies, const RVector& n_diag, double e_target, bool& at_edge,
                              double tol = 1e-12);

struct DiagonalEnsemble {
    double n_bar = 0.0;
    // Degenerate clusters (spacing below kDegeneracyTol) whose off-diagonal terms were included.
    int degenerate_blocks = 0;
    int largest_block = 1;
    // Degenerate clusters away from E = 0, reported as warnings.
    int off_zero_blocks = 0;
    // Smallest level spacing that was treated as non-degenerate.
    double min_resolved_gap = 0.0;
};

// Per-spectrum precomputation: density diagonal in the eigenbasis and the density operator restricted to
// each degenerate cluster.
class DiagonalEnsembleEvaluator {
public:
    DiagonalEnsembleEvaluator(const EigDecomposition& eig, const RVector& density_diag);

    const RVector& n_diag() const { return n_diag_; }
    // Cluster statistics with n_bar left at zero.
    const DiagonalEnsemble& stats() const { return stats_; }
    // c holds the eigenbasis coefficients of the initial state.
    DiagonalEnsemble evaluate(const CVector& c) const;

private:
    struct Cluster {
        Eigen::Index start;
        Eigen::Index size;
        Eigen::MatrixXcd block;
    };
    RVector n_diag_;
    std::vector<Cluster> clusters_;
    DiagonalEnsemble stats_;
};

DiagonalEnsemble diagonal_ensemble(const CVector& psi0, const EigDecomposition& eig, const RVector& density_diag);
double diagonal_ensemble_n(const CVector& psi0, const EigDecomposition& eig, const RVector& density_diag);

struct EnsembleGap {
    double e_target = 0.0;
    DiagonalEnsemble diagonal;
    CanonicalResult canonical;
    double delta_n = 0.0;
};

EnsembleGap ensemble_gap(const CVector& psi0, const EigDecomposition& eig, const RVector& density_diag);

}  // namespace scarsim
