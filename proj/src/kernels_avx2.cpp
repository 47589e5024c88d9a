#include "scarsim/kernels.hpp"

#if defined(__x86_64__) && defined(__AVX2__) && defined(__FMA__)
#include <immintrin.h>
#define SCARSIM_HAVE_AVX2 1
#endif

namespace scarsim::kernels {

#ifdef SCARSIM_HAVE_AVX2

namespace {

inline const double* dp(const cplx* p) { return reinterpret_cast<const double*>(p); }
inline double* dp(cplx* p) { return reinterpret_cast<double*>(p); }

inline cplx hsum_complex(__m256d v) {
    __m128d s = _mm_add_pd(_mm256_castpd256_pd128(v), _mm256_extractf128_pd(v, 1));
    double out[2];
    _mm_storeu_pd(out, s);
    return {out[0], out[1]};
}

inline double hsum(__m256d v) {
    __m128d s = _mm_add_pd(_mm256_castpd256_pd128(v), _mm256_extractf128_pd(v, 1));
    return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

// (a * b) for two packed complex pairs.
inline __m256d cmul(__m256d a, __m256d b) {
    __m256d are = _mm256_movedup_pd(a);
    __m256d aim = _mm256_permute_pd(a, 0xF);
    __m256d bsw = _mm256_permute_pd(b, 0x5);
    return _mm256_fmaddsub_pd(are, b, _mm256_mul_pd(aim, bsw));
}

inline __m256d load_pair(const cplx* x, std::uint32_t c0, std::uint32_t c1) {
    return _mm256_insertf128_pd(_mm256_castpd128_pd256(_mm_loadu_pd(dp(x + c0))), _mm_loadu_pd(dp(x + c1)), 1);
}

void csr_real(std::size_t n_rows, const std::uint64_t* row_ptr, const std::uint32_t* cols, const double* vals,
              const cplx* x, cplx* y) {
    for (std::size_t r = 0; r < n_rows; ++r) {
        __m256d acc = _mm256_setzero_pd();
        std::uint64_t j = row_ptr[r];
        const std::uint64_t end = row_ptr[r + 1];
        for (; j + 2 <= end; j += 2) {
            __m256d v = _mm256_set_pd(vals[j + 1], vals[j + 1], vals[j], vals[j]);
            acc = _mm256_fmadd_pd(v, load_pair(x, cols[j], cols[j + 1]), acc);
        }
        cplx out = hsum_complex(acc);
        if (j < end) out += vals[j] * x[cols[j]];
        y[r] = out;
    }
}

void csr_complex(std::size_t n_rows, const std::uint64_t* row_ptr, const std::uint32_t* cols, const cplx* vals,
                 const cplx* x, cplx* y) {
    for (std::size_t r = 0; r < n_rows; ++r) {
        __m256d acc = _mm256_setzero_pd();
        std::uint64_t j = row_ptr[r];
        const std::uint64_t end = row_ptr[r + 1];
        for (; j + 2 <= end; j += 2) {
            __m256d v = _mm256_loadu_pd(dp(vals + j));
            acc = _mm256_add_pd(acc, cmul(v, load_pair(x, cols[j], cols[j + 1])));
        }
        cplx out = hsum_complex(acc);
        if (j < end) out += vals[j] * x[cols[j]];
        y[r] = out;
    }
}

void axpy(std::size_t n, cplx a, const cplx* x, cplx* y) {
    const __m256d av = _mm256_set_pd(a.imag(), a.real(), a.imag(), a.real());
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        __m256d yv = _mm256_loadu_pd(dp(y + i));
        _mm256_storeu_pd(dp(y + i), _mm256_add_pd(yv, cmul(av, _mm256_loadu_pd(dp(x + i)))));
    }
    for (; i < n; ++i) y[i] += a * x[i];
}

cplx dotc(std::size_t n, const cplx* x, const cplx* y) {
    __m256d same = _mm256_setzero_pd();
    __m256d cross = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        __m256d xv = _mm256_loadu_pd(dp(x + i));
        __m256d yv = _mm256_loadu_pd(dp(y + i));
        same = _mm256_fmadd_pd(xv, yv, same);
        cross = _mm256_fmadd_pd(xv, _mm256_permute_pd(yv, 0x5), cross);
    }
    double c[4];
    _mm256_storeu_pd(c, cross);
    cplx acc(hsum(same), (c[0] - c[1]) + (c[2] - c[3]));
    for (; i < n; ++i) acc += std::conj(x[i]) * y[i];
    return acc;
}

double norm2(std::size_t n, const cplx* x) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        __m256d xv = _mm256_loadu_pd(dp(x + i));
        acc = _mm256_fmadd_pd(xv, xv, acc);
    }
    double out = hsum(acc);
    for (; i < n; ++i) out += std::norm(x[i]);
    return out;
}

void scale(std::size_t n, cplx a, cplx* x) {
    const __m256d av = _mm256_set_pd(a.imag(), a.real(), a.imag(), a.real());
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) _mm256_storeu_pd(dp(x + i), cmul(av, _mm256_loadu_pd(dp(x + i))));
    for (; i < n; ++i) x[i] *= a;
}

void diag_mul(std::size_t n, const double* d, const cplx* x, cplx* y) {
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        __m256d dv = _mm256_set_pd(d[i + 1], d[i + 1], d[i], d[i]);
        _mm256_storeu_pd(dp(y + i), _mm256_mul_pd(dv, _mm256_loadu_pd(dp(x + i))));
    }
    for (; i < n; ++i) y[i] = d[i] * x[i];
}

void diag_axpy(std::size_t n, double a, const double* d, const cplx* x, cplx* y) {
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        __m256d dv = _mm256_set_pd(a * d[i + 1], a * d[i + 1], a * d[i], a * d[i]);
        __m256d yv = _mm256_loadu_pd(dp(y + i));
        _mm256_storeu_pd(dp(y + i), _mm256_fmadd_pd(dv, _mm256_loadu_pd(dp(x + i)), yv));
    }
    for (; i < n; ++i) y[i] += (a * d[i]) * x[i];
}

double weighted_norm2(std::size_t n, const double* w, const cplx* x) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        __m256d wv = _mm256_set_pd(w[i + 1], w[i + 1], w[i], w[i]);
        __m256d xv = _mm256_loadu_pd(dp(x + i));
        acc = _mm256_fmadd_pd(wv, _mm256_mul_pd(xv, xv), acc);
    }
    double out = hsum(acc);
    for (; i < n; ++i) out += w[i] * std::norm(x[i]);
    return out;
}

}  // namespace

const KernelTable* avx2_table() {
    static const bool supported = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
    static const KernelTable table{"avx2", csr_real, csr_complex, axpy, dotc, norm2, scale, diag_mul, diag_axpy, weighted_norm2};
    return supported ? &table : nullptr;
}

#else

const KernelTable* avx2_table() { return nullptr; }

#endif

}  // namespace scarsim::kernels
