#pragma once

#include <array>
#include <limits>
#include <vector>

#include "scarsim/operators.hpp"

namespace scarsim {

struct TdvpPoint {
    double theta = 0.0;
    double phi = 0.0;
};

struct TdvpOrbit {
    double mu = 0.0;
    std::vector<double> times;
    std::vector<TdvpPoint> points;
    std::vector<double> energy_density;
    // Instants where dtheta/dt changes sign away from the pole.
    std::vector<double> turning_times;
    std::vector<TdvpPoint> turning_points;
    // First return to the start within the detection radius; NaN when none was found.
    double period = std::numeric_limits<double>::quiet_NaN();
    double closest_return = std::numeric_limits<double>::infinity();
    // Integration runs in the regular chart (u, v) = sin(theta) * (cos(phi), sin(phi)).
    const char* chart = "uv";
    int steps = 0;
};

struct AnsatzParams {
    int K = 1;
    std::vector<double> w;
    std::vector<double> gamma;
};

// Single-site tensors for the chi = 2 blockade MPS.
struct SiteTensors {
    std::array<std::array<cplx, 4>, 2> a;  // a[sigma] row-major 2x2
};
SiteTensors site_tensors(const TdvpPoint& p);

// Full-basis MPS state with per-site parameters repeating with period cell.size().
CVector mps_state(const ConstrainedBasis& basis, const std::vector<TdvpPoint>& cell);
CVector mps_state(const ConstrainedBasis& basis, const TdvpPoint& point);
// Squared norm of the unnormalized MPS from transfer matrices.
double mps_norm2(int n_sites, BoundaryCondition bc, const std::vector<TdvpPoint>& cell);

struct Rhs {
    double dtheta;
    double dphi;
};

constexpr double kPoleCutoff = 1e-6;

Rhs eom_rhs(const TdvpPoint& p, double mu);
// Regular-chart flow, z = u + i v.
std::array<double, 2> eom_rhs_uv(double u, double v, double mu);
double energy_density(const TdvpPoint& p, double mu);
double energy_density_uv(double u, double v, double mu);
double leakage(double theta);
TdvpPoint antipodal_point(double mu);

constexpr double kOrbitTol = 1e-10;

TdvpOrbit integrate_orbit(const TdvpPoint& start, double mu, double t_end, double tol = kOrbitTol,
                          double dt_out = 0.01);

// Quantum leakage rate per site from the finite-N state at the given point (PBC, tangents by central differences).
double finite_size_leakage(const ConstrainedBasis& basis, const TdvpPoint& point, double mu = 0.0);

struct GridCell {
    TdvpPoint point;
    double overlap = 0.0;
};

struct ManifoldProjection {
    TdvpPoint point;
    double overlap = 0.0;
    std::vector<GridCell> top_cells;
};

// Overlap of psi with the normalized K = 1 manifold state, evaluated from excitation-class sums.
class ManifoldOverlap {
public:
    ManifoldOverlap(const ConstrainedBasis& basis, const CVector& psi);
    double operator()(const TdvpPoint& p) const;

private:
    int n_sites_;
    BoundaryCondition bc_;
    // Indexed by [popcount][last bit] (last bit only distinguished under OBC).
    std::vector<std::array<cplx, 2>> sums_;
    std::vector<std::array<double, 2>> counts_;
};

ManifoldProjection project_to_manifold(const ConstrainedBasis& basis, const CVector& psi);

struct AnsatzResult {
    AnsatzParams params;
    double overlap = 0.0;
    bool converged = false;
    int evaluations = 0;
};

// State prepared by the ansatz: phase pulse applied to the ground state of the modulated Hamiltonian.
CVector ansatz_state(const ConstrainedBasis& basis, const AnsatzParams& params);
AnsatzResult optimize_ansatz_params(const ConstrainedBasis& basis, const CVector& target, int K);

}  // namespace scarsim
