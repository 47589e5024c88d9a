#include "scarsim/propagation.hpp"

#include <algorithm>
#include <cmath>

#include "scarsim/kernels.hpp"
#include "scarsim/operators.hpp"

namespace scarsim {

void TimeGrid::validate() const {
    if (!(dt > 0.0)) fail(ErrorKind::Config, "time step must be positive");
    if (!(t_end >= t_start)) fail(ErrorKind::Config, "time grid must satisfy t_end >= t_start");
}

std::size_t TimeGrid::steps() const {
    validate();
    double n = (t_end - t_start) / dt;
    auto steps = static_cast<std::size_t>(std::ceil(n - 1e-9));
    return steps;
}

std::vector<double> TimeGrid::points() const {
    const std::size_t n = steps();
    std::vector<double> out;
    out.reserve(n + 1);
    for (std::size_t i = 0; i < n; ++i) out.push_back(t_start + static_cast<double>(i) * dt);
    out.push_back(t_end);
    return out;
}

HermitianMap HermitianMap::from(const SparseOperator& H) {
    return {H.dim(), [&H](const cplx* x, cplx* y) { H.apply(x, y); }};
}

Eigen::MatrixXcd evolve_exact_at(const EigDecomposition& eig, const CVector& psi0, const std::vector<double>& times) {
    const CVector c = eig.coefficients(psi0);
    const RVector& lambda = eig.eigenvalues();
    Eigen::MatrixXcd phased(c.size(), static_cast<Eigen::Index>(times.size()));
    for (std::size_t ti = 0; ti < times.size(); ++ti)
        for (Eigen::Index j = 0; j < c.size(); ++j)
            phased(j, static_cast<Eigen::Index>(ti)) = c[j] * std::polar(1.0, -lambda[j] * times[ti]);
    Eigen::MatrixXcd out = eig.reconstruct(phased);
    for (std::size_t ti = 0; ti < times.size(); ++ti)
        if (times[ti] == 0.0) out.col(static_cast<Eigen::Index>(ti)) = psi0;
    return out;
}

std::vector<CVector> evolve_exact(const EigDecomposition& eig, const CVector& psi0, const TimeGrid& times) {
    const auto pts = times.points();
    Eigen::MatrixXcd block = evolve_exact_at(eig, psi0, pts);
    std::vector<CVector> out;
    out.reserve(pts.size());
    for (Eigen::Index i = 0; i < block.cols(); ++i) out.emplace_back(block.col(i));
    return out;
}

namespace {

// exp(-i tau T) e_1 for a real symmetric tridiagonal T given by its eigendecomposition.
CVector small_exp(const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>& es, double tau) {
    const RVector& d = es.eigenvalues();
    const Eigen::MatrixXd& Q = es.eigenvectors();
    CVector w(d.size());
    for (Eigen::Index i = 0; i < d.size(); ++i) w[i] = Q(0, i) * std::polar(1.0, -tau * d[i]);
    return Q.cast<cplx>() * w;
}

}  // namespace

CVector evolve_krylov(const HermitianMap& H, const CVector& psi0, double t, double tol, KrylovStats* stats) {
    const auto dim = static_cast<Eigen::Index>(H.dim);
    if (psi0.size() != dim) fail(ErrorKind::Basis, "state dimension does not match Hamiltonian");
    if (!(tol > 0.0)) fail(ErrorKind::Config, "Krylov tolerance must be positive");
    KrylovStats local;
    CVector psi = psi0;
    if (t == 0.0 || dim == 0) {
        if (stats) *stats = local;
        return psi;
    }
    const double sign = t > 0 ? 1.0 : -1.0;
    const double total = std::abs(t);
    double remaining = total;
    const Eigen::Index m_max = std::min<Eigen::Index>(kKrylovMaxDim, dim);
    const int max_substeps = 200000;
    const auto& k = kernels::active();

    Eigen::MatrixXcd V(dim, m_max + 1);
    CVector w(dim);
    while (remaining > 0.0) {
        if (local.substeps >= max_substeps)
            fail(ErrorKind::Propagation, "Krylov substep budget exhausted with " + std::to_string(remaining) +
                                             " time remaining; accumulated error bound " +
                                             std::to_string(local.error_bound));
        const double nrm = std::sqrt(k.norm2(static_cast<std::size_t>(dim), psi.data()));
        V.col(0) = psi / nrm;
        std::vector<double> alpha, beta;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
        double tau = remaining;
        double err = 0.0;
        Eigen::Index m = 0;
        bool accepted = false;
        for (Eigen::Index j = 0; j < m_max; ++j) {
            H.apply(V.col(j).data(), w.data());
            ++local.matvecs;
            double a = k.dotc(static_cast<std::size_t>(dim), V.col(j).data(), w.data()).real();
            k.axpy(static_cast<std::size_t>(dim), -a, V.col(j).data(), w.data());
            if (j > 0) k.axpy(static_cast<std::size_t>(dim), -beta[static_cast<std::size_t>(j - 1)], V.col(j - 1).data(), w.data());
            CVector h = V.leftCols(j + 1).adjoint() * w;
            w.noalias() -= V.leftCols(j + 1) * h;
            a += h[j].real();
            alpha.push_back(a);
            const double b = w.norm();
            m = j + 1;

            Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m, m);
            for (Eigen::Index i = 0; i < m; ++i) T(i, i) = alpha[static_cast<std::size_t>(i)];
            for (Eigen::Index i = 0; i + 1 < m; ++i) T(i, i + 1) = T(i + 1, i) = beta[static_cast<std::size_t>(i)];
            es.compute(T);

            const bool breakdown = b < 1e-12 * std::max(1.0, std::abs(a));
            if (breakdown || m == dim) {
                tau = remaining;
                err = 0.0;
                accepted = true;
                break;
            }
            auto estimate = [&](double step) {
                CVector y = small_exp(es, sign * step);
                return nrm * b * std::abs(y[m - 1]);
            };
            if (m >= 2) {
                double e = estimate(remaining);
                if (e <= 0.1 * tol * remaining / total) {
                    tau = remaining;
                    err = e;
                    accepted = true;
                    break;
                }
            }
            beta.push_back(b);
            V.col(j + 1) = w / b;
            if (m == m_max) {
                tau = remaining;
                err = estimate(tau);
                while (err > 0.1 * tol * tau / total) {
                    tau *= 0.5;
                    err = estimate(tau);
                    if (tau < 1e-14 * total) fail(ErrorKind::Propagation, "Krylov step size underflow");
                }
                accepted = true;
                break;
            }
        }
        if (!accepted) fail(ErrorKind::Propagation, "Krylov step not accepted");
        CVector y = small_exp(es, sign * tau) * nrm;
        psi = V.leftCols(m) * y;
        remaining -= tau;
        if (remaining < 1e-15 * total) remaining = 0.0;
        local.error_bound += err;
        ++local.substeps;
    }
    if (stats) *stats = local;
    return psi;
}

CVector evolve_krylov(const SparseOperator& H, const CVector& psi0, double t, double tol, KrylovStats* stats) {
    return evolve_krylov(HermitianMap::from(H), psi0, t, tol, stats);
}

HermitianMap AffineHamiltonian::at(double mu) const {
    const SparseOperator* kin = &kinetic;
    const RVector* cnt = &counts;
    return {kinetic.dim(), [kin, cnt, mu](const cplx* x, cplx* y) {
                kin->apply(x, y);
                kernels::active().diag_axpy(kin->dim(), mu, cnt->data(), x, y);
            }};
}

AffineHamiltonian make_affine(const ConstrainedBasis& basis) {
    return {build_pxp(basis, {1.0, 0.0}), density_diagonal(basis) * basis.n_sites()};
}

AffineHamiltonian make_affine(const SymmetrySector& sector) {
    return {build_pxp(sector, {1.0, 0.0}), density_diagonal(sector) * sector.basis().n_sites()};
}

CVector evolve_time_dependent(const std::function<double(double)>& schedule, const AffineHamiltonian& H,
                              const CVector& psi0, const TimeGrid& grid, double tol,
                              const std::function<void(double, const CVector&)>& observer) {
    grid.validate();
    if (static_cast<std::size_t>(psi0.size()) != H.kinetic.dim())
        fail(ErrorKind::Basis, "state dimension does not match Hamiltonian");
    CVector psi = psi0;
    const auto pts = grid.points();
    if (grid.t_end == grid.t_start) return psi;
    const double step_tol = tol / static_cast<double>(pts.size());
    auto mu_at = [&](double t) {
        const double mu = schedule(t);
        if (!std::isfinite(mu)) fail(ErrorKind::Schedule, "schedule returned a non-finite value at t=" + std::to_string(t));
        return mu;
    };
    double mu_prev = mu_at(pts[0]);
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        const double t0 = pts[i], t1 = pts[i + 1];
        const double mu_next = mu_at(t1);
        // Steps where mu moves by more than kMaxStepDeltaMu are split into equal midpoint substeps.
        const int sub = std::max(1, static_cast<int>(std::ceil(std::abs(mu_next - mu_prev) / kMaxStepDeltaMu)));
        const double h = (t1 - t0) / sub;
        for (int j = 0; j < sub; ++j)
            psi = evolve_krylov(H.at(mu_at(t0 + (j + 0.5) * h)), psi, h, step_tol / sub);
        mu_prev = mu_next;
        if (observer) observer(t1, psi);
    }
    return psi;
}

}  // namespace scarsim
