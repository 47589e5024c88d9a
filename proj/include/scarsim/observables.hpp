#pragma once

#include <functional>
#include <vector>

#include "scarsim/propagation.hpp"

namespace scarsim {

struct QuenchRecord {
    std::vector<double> times;
    std::vector<double> fidelity;
    std::vector<double> density_n;
    std::vector<double> entropy;
};

struct WindowSpec {
    double t0 = 1.0;
    double t1 = 20.0;

    void validate() const;
};

constexpr WindowSpec kFidelityWindow{1.0, 20.0};
constexpr WindowSpec kMsdWindow{10.0, 20.0};

double fidelity(const CVector& psi0, const CVector& psit);
double delta_F(const QuenchRecord& record, const WindowSpec& window);
double excitation_density(const RVector& density_diag, const CVector& psi);
double excitation_density(const ConstrainedBasis& basis, const CVector& psi);
double msd_n(const QuenchRecord& record, double n_th, const WindowSpec& window);
double ipr(const CVector& psi0, const EigDecomposition& eig);

// Bipartition [0, cut) | [cut, N) of full-basis states.
class EntanglementCut {
public:
    EntanglementCut(const ConstrainedBasis& basis, int cut);

    // Squared Schmidt values from the reduced density matrix of the left or right block.
    RVector schmidt_weights(const CVector& psi, bool left_side = true) const;
    double entropy(const CVector& psi, bool left_side = true) const;

private:
    std::size_t dim_;
    int n_left_ = 0;
    int n_right_ = 0;
    std::vector<int> left_;
    std::vector<int> right_;
};

double entanglement_entropy(const ConstrainedBasis& basis, const CVector& psi, int cut);

struct RevivalPeak {
    double time;
    double fidelity;
};

// First strict local maximum with t > t_min, refined by a parabola through the neighbouring samples.
RevivalPeak first_revival(const QuenchRecord& record, double t_min = 1.0);
// Highest strict local maximum with t0 < t <= t1, refined the same way.
RevivalPeak dominant_revival(const QuenchRecord& record, const WindowSpec& window);
double revival_peak_density(const QuenchRecord& record, int n_sites);

struct QuenchOptions {
    // Called on each sampled state when entropies are requested.
    std::function<double(const CVector&)> entropy;
    double tol = kKrylovTol;
};

QuenchRecord run_quench(const EigDecomposition& eig, const RVector& density_diag, const CVector& psi0,
                        const TimeGrid& grid, const QuenchOptions& options = {});
QuenchRecord run_quench(const SparseOperator& H, const RVector& density_diag, const CVector& psi0,
                        const TimeGrid& grid, const QuenchOptions& options = {});

}  // namespace scarsim
