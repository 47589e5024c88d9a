#include "scarsim/kernels.hpp"

namespace scarsim::kernels {

namespace {

void csr_real(std::size_t n_rows, const std::uint64_t* row_ptr, const std::uint32_t* cols, const double* vals,
              const cplx* x, cplx* y) {
    for (std::size_t r = 0; r < n_rows; ++r) {
        cplx acc = 0.0;
        for (std::uint64_t j = row_ptr[r]; j < row_ptr[r + 1]; ++j) acc += vals[j] * x[cols[j]];
        y[r] = acc;
    }
}

void csr_complex(std::size_t n_rows, const std::uint64_t* row_ptr, const std::uint32_t* cols, const cplx* vals,
                 const cplx* x, cplx* y) {
    for (std::size_t r = 0; r < n_rows; ++r) {
        cplx acc = 0.0;
        for (std::uint64_t j = row_ptr[r]; j < row_ptr[r + 1]; ++j) acc += vals[j] * x[cols[j]];
        y[r] = acc;
    }
}

void axpy(std::size_t n, cplx a, const cplx* x, cplx* y) {
    for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

cplx dotc(std::size_t n, const cplx* x, const cplx* y) {
    cplx acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += std::conj(x[i]) * y[i];
    return acc;
}

double norm2(std::size_t n, const cplx* x) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += std::norm(x[i]);
    return acc;
}

void scale(std::size_t n, cplx a, cplx* x) {
    for (std::size_t i = 0; i < n; ++i) x[i] *= a;
}

void diag_mul(std::size_t n, const double* d, const cplx* x, cplx* y) {
    for (std::size_t i = 0; i < n; ++i) y[i] = d[i] * x[i];
}

void diag_axpy(std::size_t n, double a, const double* d, const cplx* x, cplx* y) {
    for (std::size_t i = 0; i < n; ++i) y[i] += (a * d[i]) * x[i];
}

double weighted_norm2(std::size_t n, const double* w, const cplx* x) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += w[i] * std::norm(x[i]);
    return acc;
}

}  // namespace

const KernelTable& scalar_table() {
    static const KernelTable table{"scalar", csr_real, csr_complex, axpy, dotc, norm2, scale, diag_mul, diag_axpy, weighted_norm2};
    return table;
}

}  // namespace scarsim::kernels
