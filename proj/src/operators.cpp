#include "scarsim/operators.hpp"

#include <cmath>

namespace scarsim {

namespace {

void check_full(const ConstrainedBasis& basis, const CVector& state) {
    if (static_cast<std::size_t>(state.size()) != basis.size())
        fail(ErrorKind::Basis, "state dimension does not match the full constrained basis");
}

void check_cell(int n_sites, int K, std::size_t n_params) {
    if (K < 1 || n_sites % K != 0)
        fail(ErrorKind::Shape, "unit cell K=" + std::to_string(K) + " does not divide N=" + std::to_string(n_sites));
    if (n_params != static_cast<std::size_t>(K))
        fail(ErrorKind::Shape, "expected " + std::to_string(K) + " per-cell parameters");
}

// A single flip at site j is allowed exactly when the flipped configuration is legal.
template <class Diag>
SparseOperator build_full(const ConstrainedBasis& basis, double omega, Diag diag) {
    const int n = basis.n_sites();
    std::vector<std::vector<SparseOperator::Entry>> rows(basis.size());
    for (std::size_t i = 0; i < basis.size(); ++i) {
        const Config s = basis.state(i);
        auto& row = rows[i];
        row.reserve(static_cast<std::size_t>(n) + 1);
        double d = diag(s);
        if (d != 0.0) row.push_back({static_cast<std::uint32_t>(i), d});
        for (int j = 0; j < n; ++j) {
            Config t = s ^ (Config{1} << j);
            if (!is_legal(t, n, basis.bc())) continue;
            row.push_back({static_cast<std::uint32_t>(*basis.index_of(t)), omega});
        }
    }
    return SparseOperator::from_rows(BasisTag::full(basis), std::move(rows));
}

}  // namespace

SparseOperator build_pxp(const ConstrainedBasis& basis, const HamiltonianParams& params) {
    return build_full(basis, params.omega, [&](Config s) { return params.mu * popcount(s); });
}

SparseOperator build_modulated(const ConstrainedBasis& basis, const ModulatedParams& params) {
    const int n = basis.n_sites();
    check_cell(n, params.unit_cell_K, params.w.size());
    return build_full(basis, 1.0, [&](Config s) {
        double d = 0.0;
        for (int j = 0; j < n; ++j)
            if (s >> j & 1u) d += params.w[static_cast<std::size_t>(j % params.unit_cell_K)];
        return d;
    });
}

SparseOperator build_pxp(const SymmetrySector& sector, const HamiltonianParams& params) {
    const ConstrainedBasis& basis = sector.basis();
    const int n = basis.n_sites();
    const auto& reps = sector.representatives();
    const auto& norm = sector.normalization();
    // Column b of H is assembled from H acting on the representative of b; Hermiticity gives row b.
    std::vector<std::vector<SparseOperator::Entry>> rows(reps.size());
    for (std::size_t b = 0; b < reps.size(); ++b) {
        const Config r = reps[b];
        auto& row = rows[b];
        double d = params.mu * popcount(r);
        if (d != 0.0) row.push_back({static_cast<std::uint32_t>(b), d});
        for (int j = 0; j < n; ++j) {
            Config t = r ^ (Config{1} << j);
            if (!is_legal(t, n, basis.bc())) continue;
            std::size_t ti = *basis.index_of(t);
            int a = sector.slot_of(ti);
            if (a < 0) continue;
            cplx value = params.omega * sector.character_of(ti) * std::sqrt(norm[a] / norm[b]);
            row.push_back({static_cast<std::uint32_t>(a), std::conj(value)});
        }
    }
    return SparseOperator::from_rows(BasisTag::sector(sector), std::move(rows));
}

RVector density_diagonal(const ConstrainedBasis& basis) {
    RVector d(static_cast<Eigen::Index>(basis.size()));
    for (std::size_t i = 0; i < basis.size(); ++i)
        d[static_cast<Eigen::Index>(i)] = static_cast<double>(popcount(basis.state(i))) / basis.n_sites();
    return d;
}

RVector density_diagonal(const SymmetrySector& sector) {
    RVector d(static_cast<Eigen::Index>(sector.size()));
    for (std::size_t a = 0; a < sector.size(); ++a)
        d[static_cast<Eigen::Index>(a)] =
            static_cast<double>(popcount(sector.representatives()[a])) / sector.basis().n_sites();
    return d;
}

CVector apply_phase_pulse(const ConstrainedBasis& basis, const CVector& state, const std::vector<double>& gamma,
                          int K) {
    check_full(basis, state);
    const int n = basis.n_sites();
    check_cell(n, K, gamma.size());
    CVector out(state.size());
    for (std::size_t i = 0; i < basis.size(); ++i) {
        const Config s = basis.state(i);
        double phase = 0.0;
        for (int j = 0; j < n; ++j) phase += gamma[static_cast<std::size_t>(j % K)] * ((s >> j & 1u) ? 1.0 : -1.0);
        out[static_cast<Eigen::Index>(i)] = state[static_cast<Eigen::Index>(i)] * std::polar(1.0, -phase);
    }
    return out;
}

CVector apply_pi_reflection(const ConstrainedBasis& basis, const CVector& state) {
    check_full(basis, state);
    CVector out = state;
    for (std::size_t i = 0; i < basis.size(); ++i)
        if ((basis.n_sites() - popcount(basis.state(i))) % 2 != 0) out[static_cast<Eigen::Index>(i)] *= -1.0;
    return out;
}

}  // namespace scarsim
