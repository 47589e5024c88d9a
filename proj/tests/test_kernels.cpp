#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "scarsim/kernels.hpp"
#include "scarsim/operators.hpp"
#include "scarsim/propagation.hpp"

using namespace scarsim;
namespace k = scarsim::kernels;

namespace {

std::vector<cplx> random_vec(std::size_t n, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<cplx> v(n);
    for (auto& x : v) x = {u(rng), u(rng)};
    return v;
}

std::vector<double> random_real(std::size_t n, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> v(n);
    for (auto& x : v) x = u(rng);
    return v;
}

double max_diff(const std::vector<cplx>& a, const std::vector<cplx>& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
    return d;
}

}  // namespace

TEST_CASE("vector kernels agree between scalar and AVX2 paths") {
    const k::KernelTable* simd = k::avx2_table();
    if (!simd) {
        MESSAGE("AVX2 path unavailable on this machine; equivalence not exercised");
        return;
    }
    const k::KernelTable& ref = k::scalar_table();
    for (std::size_t n : {0u, 1u, 2u, 3u, 7u, 16u, 33u, 1001u}) {
        CAPTURE(n);
        const auto x = random_vec(n, 1), y0 = random_vec(n, 2);
        const auto d = random_real(n, 3);
        const cplx a{0.3, -1.7};

        auto y1 = y0, y2 = y0;
        ref.axpy(n, a, x.data(), y1.data());
        simd->axpy(n, a, x.data(), y2.data());
        CHECK(max_diff(y1, y2) < 1e-14);

        CHECK(std::abs(ref.dotc(n, x.data(), y0.data()) - simd->dotc(n, x.data(), y0.data())) < 1e-12);
        CHECK(ref.norm2(n, x.data()) == doctest::Approx(simd->norm2(n, x.data())).epsilon(1e-13));
        CHECK(ref.weighted_norm2(n, d.data(), x.data()) ==
              doctest::Approx(simd->weighted_norm2(n, d.data(), x.data())).epsilon(1e-12));

        y1 = x;
        y2 = x;
        ref.scale(n, a, y1.data());
        simd->scale(n, a, y2.data());
        CHECK(max_diff(y1, y2) < 1e-14);

        ref.diag_mul(n, d.data(), x.data(), y1.data());
        simd->diag_mul(n, d.data(), x.data(), y2.data());
        CHECK(max_diff(y1, y2) < 1e-15);

        y1 = y0;
        y2 = y0;
        ref.diag_axpy(n, -0.7, d.data(), x.data(), y1.data());
        simd->diag_axpy(n, -0.7, d.data(), x.data(), y2.data());
        CHECK(max_diff(y1, y2) < 1e-14);
    }
}

TEST_CASE("sparse matvec agrees between scalar and AVX2 paths") {
    const k::KernelTable* simd = k::avx2_table();
    if (!simd) return;
    auto basis = std::make_shared<const ConstrainedBasis>(enumerate_basis(14, BoundaryCondition::Periodic));
    const SparseOperator Hr = build_pxp(*basis, {1.0, 0.45});
    const SparseOperator Hc = build_pxp(build_sector(basis, 3, Parity::None), {1.0, 0.45});
    for (const SparseOperator* H : {&Hr, &Hc}) {
        const auto x = random_vec(H->dim(), 5);
        std::vector<cplx> y1(H->dim()), y2(H->dim());
        if (H->is_real()) {
            k::scalar_table().csr_matvec_real(H->dim(), H->row_ptr().data(), H->cols().data(),
                                              H->real_values().data(), x.data(), y1.data());
            simd->csr_matvec_real(H->dim(), H->row_ptr().data(), H->cols().data(), H->real_values().data(), x.data(),
                                  y2.data());
        } else {
            k::scalar_table().csr_matvec_complex(H->dim(), H->row_ptr().data(), H->cols().data(),
                                                 H->complex_values().data(), x.data(), y1.data());
            simd->csr_matvec_complex(H->dim(), H->row_ptr().data(), H->cols().data(), H->complex_values().data(),
                                     x.data(), y2.data());
        }
        CHECK(max_diff(y1, y2) < 1e-13);
    }
}

TEST_CASE("sparse apply matches the dense product") {
    const ConstrainedBasis b = enumerate_basis(10, BoundaryCondition::Open);
    const SparseOperator H = build_pxp(b, {1.0, -0.3});
    const CVector x = oracle::random_state(static_cast<Eigen::Index>(b.size()), 6);
    CHECK((H.apply(x) - H.dense() * x).norm() < 1e-13);
}

TEST_CASE("forced scalar path reproduces the dispatched propagation") {
    const ConstrainedBasis b = enumerate_basis(12, BoundaryCondition::Periodic);
    const SparseOperator H = build_pxp(b, {1.0, 0.6});
    const CVector psi0 = z2_state(b);
    const CVector fast = evolve_krylov(H, psi0, 3.0);
    k::force_scalar(true);
    CHECK(std::string(k::active().name) == k::scalar_table().name);
    const CVector slow = evolve_krylov(H, psi0, 3.0);
    k::force_scalar(false);
    CHECK((fast - slow).norm() < 1e-10);
}
