#include "scarsim/sparse.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>
#include <sstream>

#include "scarsim/kernels.hpp"

namespace scarsim {

BasisTag BasisTag::full(const ConstrainedBasis& basis) {
    BasisTag tag;
    tag.n_sites = basis.n_sites();
    tag.bc = basis.bc();
    tag.dim = basis.size();
    return tag;
}

BasisTag BasisTag::sector(const SymmetrySector& sector) {
    BasisTag tag = full(sector.basis());
    tag.is_sector = true;
    tag.k = sector.momentum_k();
    tag.p = sector.inversion_p();
    tag.dim = sector.size();
    return tag;
}

std::string BasisTag::describe() const {
    std::ostringstream os;
    os << "N=" << n_sites << " " << boundary_name(bc);
    if (is_sector) os << " k=" << k << " p=" << parity_name(p);
    os << " dim=" << dim;
    return os.str();
}

SparseOperator SparseOperator::from_rows(BasisTag tag, std::vector<std::vector<Entry>> rows) {
    if (rows.size() != tag.dim) fail(ErrorKind::Basis, "row count does not match " + tag.describe());
    SparseOperator op;
    op.tag_ = tag;
    op.row_ptr_.reserve(rows.size() + 1);
    op.row_ptr_.push_back(0);
    std::vector<cplx> values;
    for (auto& row : rows) {
        std::sort(row.begin(), row.end(), [](const Entry& a, const Entry& b) { return a.col < b.col; });
        for (std::size_t j = 0; j < row.size();) {
            std::uint32_t col = row[j].col;
            cplx sum = 0.0;
            for (; j < row.size() && row[j].col == col; ++j) sum += row[j].value;
            if (std::abs(sum) < 1e-14) continue;
            op.cols_.push_back(col);
            values.push_back(sum);
        }
        op.row_ptr_.push_back(op.cols_.size());
    }
    op.is_real_ = std::all_of(values.begin(), values.end(), [](const cplx& v) { return v.imag() == 0.0; });
    if (op.is_real_) {
        op.real_vals_.reserve(values.size());
        for (const auto& v : values) op.real_vals_.push_back(v.real());
    } else {
        op.complex_vals_ = std::move(values);
    }
    return op;
}

void SparseOperator::apply(const cplx* x, cplx* y) const {
    const auto& k = kernels::active();
    if (is_real_)
        k.csr_matvec_real(dim(), row_ptr_.data(), cols_.data(), real_vals_.data(), x, y);
    else
        k.csr_matvec_complex(dim(), row_ptr_.data(), cols_.data(), complex_vals_.data(), x, y);
}

CVector SparseOperator::apply(const CVector& x) const {
    if (static_cast<std::size_t>(x.size()) != dim()) fail(ErrorKind::Basis, "vector dimension does not match operator");
    CVector y(x.size());
    apply(x.data(), y.data());
    return y;
}

double SparseOperator::expectation(const CVector& psi) const {
    CVector h = apply(psi);
    return kernels::active().dotc(dim(), psi.data(), h.data()).real();
}

Eigen::MatrixXcd SparseOperator::dense() const {
    const auto n = static_cast<Eigen::Index>(dim());
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
    for (std::size_t r = 0; r < dim(); ++r)
        for (std::uint64_t j = row_ptr_[r]; j < row_ptr_[r + 1]; ++j)
            m(static_cast<Eigen::Index>(r), cols_[j]) = value_at(j);
    return m;
}

Eigen::MatrixXd SparseOperator::dense_real() const {
    if (!is_real_) fail(ErrorKind::Basis, "operator has complex elements");
    const auto n = static_cast<Eigen::Index>(dim());
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t r = 0; r < dim(); ++r)
        for (std::uint64_t j = row_ptr_[r]; j < row_ptr_[r + 1]; ++j)
            m(static_cast<Eigen::Index>(r), cols_[j]) = real_vals_[j];
    return m;
}

double SparseOperator::hermiticity_error() const {
    double worst = 0.0;
    for (std::size_t r = 0; r < dim(); ++r) {
        for (std::uint64_t j = row_ptr_[r]; j < row_ptr_[r + 1]; ++j) {
            const std::uint32_t c = cols_[j];
            auto begin = cols_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[c]);
            auto end = cols_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[c + 1]);
            auto it = std::lower_bound(begin, end, static_cast<std::uint32_t>(r));
            cplx mirror = (it != end && *it == r) ? value_at(static_cast<std::size_t>(it - cols_.begin())) : 0.0;
            worst = std::max(worst, std::abs(value_at(j) - std::conj(mirror)));
        }
    }
    return worst;
}

void SparseOperator::write_matrix_market(std::ostream& os) const {
    os << "%%MatrixMarket matrix coordinate " << (is_real_ ? "real" : "complex") << " general\n";
    os << "% " << tag_.describe() << "\n";
    os << dim() << " " << dim() << " " << nnz() << "\n";
    char buf[128];
    for (std::size_t r = 0; r < dim(); ++r) {
        for (std::uint64_t j = row_ptr_[r]; j < row_ptr_[r + 1]; ++j) {
            if (is_real_)
                std::snprintf(buf, sizeof buf, "%zu %u %.17g\n", r + 1, cols_[j] + 1, real_vals_[j]);
            else
                std::snprintf(buf, sizeof buf, "%zu %u %.17g %.17g\n", r + 1, cols_[j] + 1, complex_vals_[j].real(),
                              complex_vals_[j].imag());
            os << buf;
        }
    }
}

}  // namespace scarsim
