#pragma once

#include <vector>

#include "scarsim/sparse.hpp"

namespace scarsim {

struct HamiltonianParams {
    double omega = 1.0;
    double mu = 0.0;
};

struct ModulatedParams {
    int unit_cell_K = 1;
    std::vector<double> w;
    std::vector<double> gamma;
};

SparseOperator build_pxp(const ConstrainedBasis& basis, const HamiltonianParams& params);
SparseOperator build_pxp(const SymmetrySector& sector, const HamiltonianParams& params);
SparseOperator build_modulated(const ConstrainedBasis& basis, const ModulatedParams& params);

// Per-state excitation density popcount(s)/N; diagonal in both full and sector bases.
RVector density_diagonal(const ConstrainedBasis& basis);
RVector density_diagonal(const SymmetrySector& sector);

CVector apply_phase_pulse(const ConstrainedBasis& basis, const CVector& state, const std::vector<double>& gamma,
                          int K);
CVector apply_pi_reflection(const ConstrainedBasis& basis, const CVector& state);

}  // namespace scarsim
