#include "scarsim/ensembles.hpp"

#include <cmath>
#include <limits>

#include <boost/math/tools/roots.hpp>

namespace scarsim {

CanonicalResult canonical_at(const RVector& energies, const RVector& n_diag, double beta) {
    if (energies.size() != n_diag.size() || energies.size() == 0)
        fail(ErrorKind::Basis, "spectrum and density diagonal differ in size");
    const double ref = beta >= 0.0 ? energies.minCoeff() : energies.maxCoeff();
    double z = 0.0, e = 0.0, n = 0.0;
    for (Eigen::Index j = 0; j < energies.size(); ++j) {
        const double w = std::exp(-beta * (energies[j] - ref));
        z += w;
        e += w * energies[j];
        n += w * n_diag[j];
    }
    return {beta, n / z, e / z};
}

CanonicalResult solve_beta(const RVector& energies, const RVector& n_diag, double e_target, double tol) {
    const double e_min = energies.minCoeff(), e_max = energies.maxCoeff();
    if (!(e_target > e_min + tol && e_target < e_max - tol))
        fail(ErrorKind::UnboundedBeta, "target energy " + std::to_string(e_target) + " at or beyond the spectral edge");
    auto f = [&](double beta) { return canonical_at(energies, n_diag, beta).mean_energy - e_target; };
    const double f_lo = f(-kBetaCap), f_hi = f(kBetaCap);
    if (!(f_lo >= 0.0 && f_hi <= 0.0))
        fail(ErrorKind::Bracket, "no sign change of the canonical energy on [-50, 50]");
    if (f_lo == 0.0) return canonical_at(energies, n_diag, -kBetaCap);
    if (f_hi == 0.0) return canonical_at(energies, n_diag, kBetaCap);
    std::uintmax_t max_iter = 200;
    auto stop = [tol](double a, double b) { return std::abs(b - a) <= tol * std::max(1.0, std::abs(a)); };
    auto [lo, hi] = boost::math::tools::toms748_solve(f, -kBetaCap, kBetaCap, f_lo, f_hi, stop, max_iter);
    const double beta = 0.5 * (lo + hi);
    return canonical_at(energies, n_diag, beta);
}

CanonicalResult thermal_value(const RVector& energies, const RVector& n_diag, double e_target, bool& at_edge,
                              double tol) {
    at_edge = false;
    const CanonicalResult cold = canonical_at(energies, n_diag, kBetaCap);
    const CanonicalResult hot = canonical_at(energies, n_diag, -kBetaCap);
    if (e_target <= cold.mean_energy + tol) {
        at_edge = true;
        return cold;
    }
    if (e_target >= hot.mean_energy - tol) {
        at_edge = true;
        return hot;
    }
    return solve_beta(energies, n_diag, e_target, tol);
}

CanonicalResult solve_beta(const EigDecomposition& eig, const RVector& density_diag, double e_target, double tol) {
    return solve_beta(eig.eigenvalues(), eig.diagonal_in_eigenbasis(density_diag), e_target, tol);
}

DiagonalEnsembleEvaluator::DiagonalEnsembleEvaluator(const EigDecomposition& eig, const RVector& density_diag)
    : n_diag_(eig.diagonal_in_eigenbasis(density_diag)) {
    const RVector& e = eig.eigenvalues();
    stats_.min_resolved_gap = std::numeric_limits<double>::infinity();
    const Eigen::Index dim = e.size();
    for (Eigen::Index start = 0; start < dim;) {
        Eigen::Index end = start + 1;
        while (end < dim && e[end] - e[end - 1] < kDegeneracyTol) ++end;
        if (end < dim) stats_.min_resolved_gap = std::min(stats_.min_resolved_gap, e[end] - e[end - 1]);
        const Eigen::Index size = end - start;
        if (size > 1) {
            ++stats_.degenerate_blocks;
            stats_.largest_block = std::max<int>(stats_.largest_block, static_cast<int>(size));
            if (std::abs(0.5 * (e[start] + e[end - 1])) > kDegeneracyTol) ++stats_.off_zero_blocks;
            Eigen::MatrixXcd block;
            if (eig.is_real()) {
                const auto vb = eig.real_vectors().middleCols(start, size);
                block = (vb.transpose() * density_diag.asDiagonal() * vb).cast<cplx>();
            } else {
                const auto vb = eig.complex_vectors().middleCols(start, size);
                block = vb.adjoint() * density_diag.cast<cplx>().asDiagonal() * vb;
            }
            clusters_.push_back({start, size, std::move(block)});
        }
        start = end;
    }
}

DiagonalEnsemble DiagonalEnsembleEvaluator::evaluate(const CVector& c) const {
    if (c.size() != n_diag_.size()) fail(ErrorKind::Basis, "coefficient dimension does not match eigenbasis");
    DiagonalEnsemble out = stats_;
    RVector w = c.cwiseAbs2();
    for (const auto& cl : clusters_) w.segment(cl.start, cl.size).setZero();
    out.n_bar = w.dot(n_diag_);
    for (const auto& cl : clusters_) {
        const CVector cb = c.segment(cl.start, cl.size);
        out.n_bar += (cb.adjoint() * cl.block * cb)(0, 0).real();
    }
    return out;
}

DiagonalEnsemble diagonal_ensemble(const CVector& psi0, const EigDecomposition& eig, const RVector& density_diag) {
    return DiagonalEnsembleEvaluator(eig, density_diag).evaluate(eig.coefficients(psi0));
}

double diagonal_ensemble_n(const CVector& psi0, const EigDecomposition& eig, const RVector& density_diag) {
    return diagonal_ensemble(psi0, eig, density_diag).n_bar;
}

EnsembleGap ensemble_gap(const CVector& psi0, const EigDecomposition& eig, const RVector& density_diag) {
    EnsembleGap out;
    const CVector c = eig.coefficients(psi0);
    out.e_target = (c.cwiseAbs2().array() * eig.eigenvalues().array()).sum();
    out.diagonal = diagonal_ensemble(psi0, eig, density_diag);
    out.canonical = solve_beta(eig, density_diag, out.e_target);
    out.delta_n = out.diagonal.n_bar - out.canonical.n_th;
    return out;
}

}  // namespace scarsim
