#pragma once

#include <vector>

#include "scarsim/sparse.hpp"

namespace scarsim {

// Dense eigendecomposition; eigenvectors are kept real whenever the operator is real.
class EigDecomposition {
public:
    EigDecomposition() = default;
    EigDecomposition(BasisTag tag, RVector values, Eigen::MatrixXd vectors);
    EigDecomposition(BasisTag tag, RVector values, Eigen::MatrixXcd vectors);

    const BasisTag& tag() const { return tag_; }
    std::size_t dim() const { return static_cast<std::size_t>(values_.size()); }
    const RVector& eigenvalues() const { return values_; }
    bool is_real() const { return real_; }
    const Eigen::MatrixXd& real_vectors() const { return rvec_; }
    const Eigen::MatrixXcd& complex_vectors() const { return cvec_; }
    CVector eigenvector(std::size_t j) const;

    // c = V^dagger psi
    CVector coefficients(const CVector& psi) const;
    // psi = V c, column by column for a block of coefficient vectors.
    CVector reconstruct(const CVector& c) const;
    Eigen::MatrixXcd reconstruct(const Eigen::MatrixXcd& c) const;
    // Diagonal operator d expressed in the eigenbasis, V^dagger diag(d) V.
    Eigen::MatrixXcd operator_in_eigenbasis(const RVector& d) const;
    RVector diagonal_in_eigenbasis(const RVector& d) const;

private:
    BasisTag tag_;
    RVector values_;
    bool real_ = true;
    Eigen::MatrixXd rvec_;
    Eigen::MatrixXcd cvec_;
};

// Full diagonalization with a residual check max|HV - V Lambda| <= 1e-9.
EigDecomposition diagonalize(const SparseOperator& H);

struct EigenPairs {
    RVector values;
    std::vector<CVector> vectors;
    std::vector<double> residuals;
    int matvecs = 0;
};

// Lowest nev eigenpairs of a Hermitian operator by thick-restarted Lanczos with full reorthogonalization.
EigenPairs lowest_eigenpairs(const SparseOperator& H, int nev, double tol = 1e-10, const CVector* start = nullptr);

// Rotate so the largest-magnitude amplitude is real and positive.
void fix_phase(CVector& psi);

}  // namespace scarsim
