#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "scarsim/basis.hpp"

namespace scarsim {

// Identifies the space an operator or state lives in.
struct BasisTag {
    int n_sites = 0;
    BoundaryCondition bc = BoundaryCondition::Periodic;
    bool is_sector = false;
    int k = 0;
    Parity p = Parity::None;
    std::size_t dim = 0;

    static BasisTag full(const ConstrainedBasis& basis);
    static BasisTag sector(const SymmetrySector& sector);
    std::string describe() const;
    bool operator==(const BasisTag& other) const = default;
};

// Compressed-row Hermitian operator. Values are stored real when every element is real.
class SparseOperator {
public:
    struct Entry {
        std::uint32_t col;
        cplx value;
    };

    SparseOperator() = default;
    // Rows must be given in order; duplicate columns within a row are summed.
    static SparseOperator from_rows(BasisTag tag, std::vector<std::vector<Entry>> rows);

    std::size_t dim() const { return tag_.dim; }
    const BasisTag& tag() const { return tag_; }
    bool is_real() const { return is_real_; }
    std::size_t nnz() const { return cols_.size(); }
    const std::vector<std::uint64_t>& row_ptr() const { return row_ptr_; }
    const std::vector<std::uint32_t>& cols() const { return cols_; }
    const std::vector<double>& real_values() const { return real_vals_; }
    const std::vector<cplx>& complex_values() const { return complex_vals_; }
    cplx value_at(std::size_t idx) const { return is_real_ ? cplx(real_vals_[idx]) : complex_vals_[idx]; }

    void apply(const cplx* x, cplx* y) const;
    CVector apply(const CVector& x) const;
    double expectation(const CVector& psi) const;

    Eigen::MatrixXcd dense() const;
    Eigen::MatrixXd dense_real() const;
    double hermiticity_error() const;
    void write_matrix_market(std::ostream& os) const;

private:
    BasisTag tag_;
    bool is_real_ = true;
    std::vector<std::uint64_t> row_ptr_;
    std::vector<std::uint32_t> cols_;
    std::vector<double> real_vals_;
    std::vector<cplx> complex_vals_;
};

}  // namespace scarsim
