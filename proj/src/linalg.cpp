#include "scarsim/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "scarsim/kernels.hpp"

namespace scarsim {

EigDecomposition::EigDecomposition(BasisTag tag, RVector values, Eigen::MatrixXd vectors)
    : tag_(tag), values_(std::move(values)), real_(true), rvec_(std::move(vectors)) {}

EigDecomposition::EigDecomposition(BasisTag tag, RVector values, Eigen::MatrixXcd vectors)
    : tag_(tag), values_(std::move(values)), real_(false), cvec_(std::move(vectors)) {}

CVector EigDecomposition::eigenvector(std::size_t j) const {
    const auto c = static_cast<Eigen::Index>(j);
    if (real_) return rvec_.col(c).cast<cplx>();
    return cvec_.col(c);
}

CVector EigDecomposition::coefficients(const CVector& psi) const {
    if (static_cast<std::size_t>(psi.size()) != dim()) fail(ErrorKind::Basis, "state dimension does not match eigenbasis");
    if (real_) {
        CVector out(psi.size());
        out.real() = rvec_.transpose() * psi.real();
        out.imag() = rvec_.transpose() * psi.imag();
        return out;
    }
    return cvec_.adjoint() * psi;
}

CVector EigDecomposition::reconstruct(const CVector& c) const {
    if (static_cast<std::size_t>(c.size()) != dim()) fail(ErrorKind::Basis, "coefficient dimension does not match");
    if (real_) {
        CVector out(c.size());
        out.real() = rvec_ * c.real();
        out.imag() = rvec_ * c.imag();
        return out;
    }
    return cvec_ * c;
}

Eigen::MatrixXcd EigDecomposition::reconstruct(const Eigen::MatrixXcd& c) const {
    if (static_cast<std::size_t>(c.rows()) != dim()) fail(ErrorKind::Basis, "coefficient dimension does not match");
    if (real_) {
        Eigen::MatrixXcd out(c.rows(), c.cols());
        out.real() = rvec_ * c.real();
        out.imag() = rvec_ * c.imag();
        return out;
    }
    return cvec_ * c;
}

Eigen::MatrixXcd EigDecomposition::operator_in_eigenbasis(const RVector& d) const {
    if (real_) return (rvec_.transpose() * d.asDiagonal() * rvec_).cast<cplx>();
    return cvec_.adjoint() * d.cast<cplx>().asDiagonal() * cvec_;
}

RVector EigDecomposition::diagonal_in_eigenbasis(const RVector& d) const {
    if (real_) return (rvec_.array().square().colwise() * d.array()).colwise().sum().transpose();
    return (cvec_.array().abs2().colwise() * d.array()).colwise().sum().transpose();
}

EigDecomposition diagonalize(const SparseOperator& H) {
    EigDecomposition eig;
    if (H.is_real()) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(H.dense_real());
        if (solver.info() != Eigen::Success) fail(ErrorKind::Solver, "dense eigensolver failed");
        eig = EigDecomposition(H.tag(), solver.eigenvalues(), solver.eigenvectors());
    } else {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(H.dense());
        if (solver.info() != Eigen::Success) fail(ErrorKind::Solver, "dense eigensolver failed");
        eig = EigDecomposition(H.tag(), solver.eigenvalues(), solver.eigenvectors());
    }
    // Residual probe through the sparse operator, one eigenvector at a time.
    double worst = 0.0;
    CVector hv(static_cast<Eigen::Index>(H.dim()));
    for (std::size_t j = 0; j < eig.dim(); ++j) {
        CVector v = eig.eigenvector(j);
        H.apply(v.data(), hv.data());
        worst = std::max(worst, (hv - eig.eigenvalues()[static_cast<Eigen::Index>(j)] * v).cwiseAbs().maxCoeff());
    }
    if (worst > 1e-9) fail(ErrorKind::Solver, "eigendecomposition residual " + std::to_string(worst) + " exceeds 1e-9");
    return eig;
}

void fix_phase(CVector& psi) {
    Eigen::Index arg = 0;
    psi.cwiseAbs().maxCoeff(&arg);
    if (std::abs(psi[arg]) == 0.0) return;
    psi *= std::conj(psi[arg]) / std::abs(psi[arg]);
}

namespace {

EigenPairs dense_lowest(const SparseOperator& H, int nev) {
    EigDecomposition eig = diagonalize(H);
    EigenPairs out;
    out.values = eig.eigenvalues().head(nev);
    for (int i = 0; i < nev; ++i) {
        CVector v = eig.eigenvector(static_cast<std::size_t>(i));
        fix_phase(v);
        out.residuals.push_back((H.apply(v) - out.values[i] * v).norm());
        out.vectors.push_back(std::move(v));
    }
    return out;
}

}  // namespace

EigenPairs lowest_eigenpairs(const SparseOperator& H, int nev, double tol, const CVector* start) {
    const auto dim = static_cast<Eigen::Index>(H.dim());
    if (nev < 1 || nev > dim) fail(ErrorKind::Solver, "requested eigenpair count outside [1, dim]");
    if (dim <= 400) return dense_lowest(H, nev);

    const Eigen::Index m_max = std::min<Eigen::Index>(dim, std::max<Eigen::Index>(60, 4 * nev + 40));
    const Eigen::Index keep = std::min<Eigen::Index>(m_max / 2, nev + 10);
    const int max_restarts = 200;

    Eigen::MatrixXcd V(dim, m_max + 1);
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m_max, m_max);
    CVector v0;
    if (start && start->size() == dim && start->norm() > 0) {
        v0 = *start;
    } else {
        std::mt19937_64 rng(0x5ca25);
        std::normal_distribution<double> gauss;
        v0.resize(dim);
        for (Eigen::Index i = 0; i < dim; ++i) v0[i] = cplx(gauss(rng), 0.0);
    }
    V.col(0) = v0 / v0.norm();

    EigenPairs out;
    Eigen::Index k = 0;
    CVector w(dim);
    std::mt19937_64 refill(0xbeef);
    std::normal_distribution<double> gauss;
    for (int restart = 0; restart <= max_restarts; ++restart) {
        double beta = 0.0;
        Eigen::Index m = k;
        for (Eigen::Index j = k; j < m_max; ++j) {
            H.apply(V.col(j).data(), w.data());
            ++out.matvecs;
            CVector h = V.leftCols(j + 1).adjoint() * w;
            w.noalias() -= V.leftCols(j + 1) * h;
            CVector h2 = V.leftCols(j + 1).adjoint() * w;
            w.noalias() -= V.leftCols(j + 1) * h2;
            h += h2;
            for (Eigen::Index i = 0; i <= j; ++i) {
                T(i, j) = h[i].real();
                T(j, i) = h[i].real();
            }
            beta = w.norm();
            m = j + 1;
            if (beta < 1e-12) {
                // Invariant subspace: continue from a fresh orthogonal direction with zero coupling.
                for (Eigen::Index i = 0; i < dim; ++i) w[i] = cplx(gauss(refill), 0.0);
                for (int pass = 0; pass < 2; ++pass) w.noalias() -= V.leftCols(j + 1) * (V.leftCols(j + 1).adjoint() * w);
                V.col(j + 1) = w / w.norm();
                beta = 0.0;
                if (m >= dim) break;
                continue;
            }
            V.col(j + 1) = w / beta;
            if (m >= dim) break;
        }

        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ritz(T.topLeftCorner(m, m));
        const RVector& theta = ritz.eigenvalues();
        const Eigen::MatrixXd& S = ritz.eigenvectors();
        bool converged = true;
        for (int i = 0; i < nev; ++i)
            if (beta * std::abs(S(m - 1, i)) > 0.5 * tol) converged = false;

        if (converged || restart == max_restarts || m >= dim) {
            out.values = theta.head(nev);
            for (int i = 0; i < nev; ++i) {
                CVector v = V.leftCols(m) * S.col(i).cast<cplx>();
                v /= v.norm();
                fix_phase(v);
                out.residuals.push_back((H.apply(v) - theta[i] * v).norm());
                out.vectors.push_back(std::move(v));
            }
            double worst = *std::max_element(out.residuals.begin(), out.residuals.end());
            if (worst > tol) {
                if (dim <= 4000) return dense_lowest(H, nev);
                fail(ErrorKind::Solver, "Lanczos did not converge, residual " + std::to_string(worst));
            }
            return out;
        }

        // Thick restart: lowest Ritz vectors plus the current residual direction.
        Eigen::MatrixXcd Y = V.leftCols(m) * S.leftCols(keep).cast<cplx>();
        CVector next = V.col(m);
        V.leftCols(keep) = Y;
        V.col(keep) = next;
        T.setZero();
        for (Eigen::Index i = 0; i < keep; ++i) T(i, i) = theta[i];
        k = keep;
    }
    fail(ErrorKind::Solver, "Lanczos restart budget exhausted");
}

}  // namespace scarsim
