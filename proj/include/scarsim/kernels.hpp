#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>

namespace scarsim::kernels {

using cplx = std::complex<double>;

// Flat loops shared by the sparse operators and the Krylov solvers.
struct KernelTable {
    const char* name;
    // y[r] = sum_j vals[j] * x[cols[j]] over row r of a CSR matrix.
    void (*csr_matvec_real)(std::size_t n_rows, const std::uint64_t* row_ptr, const std::uint32_t* cols,
                            const double* vals, const cplx* x, cplx* y);
    void (*csr_matvec_complex)(std::size_t n_rows, const std::uint64_t* row_ptr, const std::uint32_t* cols,
                               const cplx* vals, const cplx* x, cplx* y);
    // y += a * x
    void (*axpy)(std::size_t n, cplx a, const cplx* x, cplx* y);
    // sum conj(x[i]) * y[i]
    cplx (*dotc)(std::size_t n, const cplx* x, const cplx* y);
    // sum |x[i]|^2
    double (*norm2)(std::size_t n, const cplx* x);
    // x *= a
    void (*scale)(std::size_t n, cplx a, cplx* x);
    // y[i] = d[i] * x[i]
    void (*diag_mul)(std::size_t n, const double* d, const cplx* x, cplx* y);
    // y[i] += a * d[i] * x[i]
    void (*diag_axpy)(std::size_t n, double a, const double* d, const cplx* x, cplx* y);
    // sum w[i] * |x[i]|^2
    double (*weighted_norm2)(std::size_t n, const double* w, const cplx* x);
};

const KernelTable& scalar_table();
// Null when the binary was built without x86 SIMD support or the CPU lacks AVX2/FMA.
const KernelTable* avx2_table();

// Table used by the library. Chosen once from CPU features; SCARSIM_SIMD=scalar forces the reference path.
const KernelTable& active();
void force_scalar(bool on);

}  // namespace scarsim::kernels
