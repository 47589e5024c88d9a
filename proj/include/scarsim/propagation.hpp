#pragma once

#include <functional>
#include <vector>

#include "scarsim/linalg.hpp"

namespace scarsim {

struct TimeGrid {
    double t_start = 0.0;
    double t_end = 0.0;
    double dt = 0.05;

    void validate() const;
    // Uniform samples from t_start; the last sample is t_end.
    std::vector<double> points() const;
    std::size_t steps() const;
};

// Hermitian linear map y = H x over a fixed dimension.
struct HermitianMap {
    std::size_t dim = 0;
    std::function<void(const cplx*, cplx*)> apply;

    static HermitianMap from(const SparseOperator& H);
};

struct KrylovStats {
    int substeps = 0;
    int matvecs = 0;
    double error_bound = 0.0;
};

std::vector<CVector> evolve_exact(const EigDecomposition& eig, const CVector& psi0, const TimeGrid& times);
// Columns are psi(t) for each requested time.
Eigen::MatrixXcd evolve_exact_at(const EigDecomposition& eig, const CVector& psi0, const std::vector<double>& times);

constexpr int kKrylovMaxDim = 40;
constexpr double kKrylovTol = 1e-9;

CVector evolve_krylov(const HermitianMap& H, const CVector& psi0, double t, double tol = kKrylovTol,
                      KrylovStats* stats = nullptr);
CVector evolve_krylov(const SparseOperator& H, const CVector& psi0, double t, double tol = kKrylovTol,
                      KrylovStats* stats = nullptr);

// H(mu) = K + mu * diag(counts), the form shared by every chemical-potential schedule.
struct AffineHamiltonian {
    SparseOperator kinetic;
    RVector counts;

    HermitianMap at(double mu) const;
};

AffineHamiltonian make_affine(const ConstrainedBasis& basis);
AffineHamiltonian make_affine(const SymmetrySector& sector);

constexpr double kRampDt = 0.0025;
constexpr double kMaxStepDeltaMu = 0.25;

// Midpoint-frozen product of short-time exponentials. The observer, if set, is called after every grid step.
CVector evolve_time_dependent(const std::function<double(double)>& schedule, const AffineHamiltonian& H,
                              const CVector& psi0, const TimeGrid& grid, double tol = kKrylovTol,
                              const std::function<void(double, const CVector&)>& observer = {});

}  // namespace scarsim
