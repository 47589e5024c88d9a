#include <algorithm>
#include <cmath>
#include <numbers>

#include "scarsim/linalg.hpp"
#include "scarsim/optimize.hpp"
#include "scarsim/tdvp.hpp"

namespace scarsim {

namespace {

constexpr double kPi = std::numbers::pi;

struct AnsatzEvaluator {
    const ConstrainedBasis& basis;
    const CVector& target;
    int K;
    CVector warm;
    int evaluations = 0;

    CVector ground_state(const std::vector<double>& w) {
        SparseOperator H = build_modulated(basis, {K, w, {}});
        const CVector* start = warm.size() == target.size() ? &warm : nullptr;
        EigenPairs gs = lowest_eigenpairs(H, 1, 1e-9, start);
        warm = gs.vectors.front();
        ++evaluations;
        return gs.vectors.front();
    }

    double overlap(const CVector& gs, const std::vector<double>& gamma) const {
        CVector st = apply_phase_pulse(basis, gs, gamma, K);
        return std::norm(st.dot(target));
    }

    // Best pulse for a fixed ground state: grid over one period of each angle, then simplex.
    std::pair<std::vector<double>, double> best_gamma(const CVector& gs) const {
        const int grid = K == 1 ? 48 : 16;
        std::vector<double> best(static_cast<std::size_t>(K), 0.0);
        double best_ov = -1.0;
        std::vector<double> g(static_cast<std::size_t>(K));
        const int total = static_cast<int>(std::pow(grid, K));
        for (int idx = 0; idx < total; ++idx) {
            int rest = idx;
            for (int k = 0; k < K; ++k) {
                g[static_cast<std::size_t>(k)] = (rest % grid) * kPi / grid;
                rest /= grid;
            }
            double ov = overlap(gs, g);
            if (ov > best_ov) {
                best_ov = ov;
                best = g;
            }
        }
        auto res = minimize_simplex([&](const std::vector<double>& x) { return -overlap(gs, x); }, best,
                                    std::vector<double>(static_cast<std::size_t>(K), kPi / grid), 1e-8, 500);
        if (-res.value > best_ov) return {res.x, -res.value};
        return {best, best_ov};
    }
};

}  // namespace

CVector ansatz_state(const ConstrainedBasis& basis, const AnsatzParams& params) {
    SparseOperator H = build_modulated(basis, {params.K, params.w, {}});
    EigenPairs gs = lowest_eigenpairs(H, 1, 1e-10);
    return apply_phase_pulse(basis, gs.vectors.front(), params.gamma, params.K);
}

AnsatzResult optimize_ansatz_params(const ConstrainedBasis& basis, const CVector& target, int K) {
    if (K != 1 && K != 2) fail(ErrorKind::Shape, "ansatz optimization supports K = 1 or 2");
    if (basis.n_sites() % K != 0) fail(ErrorKind::Shape, "unit cell does not divide N");
    if (static_cast<std::size_t>(target.size()) != basis.size())
        fail(ErrorKind::Basis, "target must be a full-basis state");
    AnsatzEvaluator ev{basis, target, K, CVector(), 0};

    // Coarse scan over the modulation with the pulse optimized per point.
    std::vector<double> w_grid;
    for (double w = -6.0; w <= 6.0 + 1e-12; w += 1.0) w_grid.push_back(w);
    const int per_axis = static_cast<int>(w_grid.size());
    const int total = K == 1 ? per_axis : per_axis * per_axis;
    AnsatzParams best{K, std::vector<double>(static_cast<std::size_t>(K)), std::vector<double>(static_cast<std::size_t>(K))};
    double best_ov = -1.0;
    for (int idx = 0; idx < total; ++idx) {
        std::vector<double> w(static_cast<std::size_t>(K));
        w[0] = w_grid[static_cast<std::size_t>(idx % per_axis)];
        if (K == 2) w[1] = w_grid[static_cast<std::size_t>(idx / per_axis)];
        CVector gs = ev.ground_state(w);
        auto [gamma, ov] = ev.best_gamma(gs);
        if (ov > best_ov) {
            best_ov = ov;
            best.w = w;
            best.gamma = gamma;
        }
    }

    // Joint refinement over (w, gamma).
    auto objective = [&](const std::vector<double>& x) {
        std::vector<double> w(x.begin(), x.begin() + K), g(x.begin() + K, x.end());
        return -ev.overlap(ev.ground_state(w), g);
    };
    std::vector<double> x0 = best.w;
    x0.insert(x0.end(), best.gamma.begin(), best.gamma.end());
    std::vector<double> step(static_cast<std::size_t>(2 * K), 0.5);
    for (int k = 0; k < K; ++k) step[static_cast<std::size_t>(K + k)] = 0.1;
    SimplexResult res = minimize_simplex(objective, x0, step, 1e-6, 600);

    AnsatzResult out;
    out.params = best;
    out.overlap = best_ov;
    if (-res.value >= best_ov) {
        out.params.w.assign(res.x.begin(), res.x.begin() + K);
        out.params.gamma.assign(res.x.begin() + K, res.x.end());
        out.overlap = -res.value;
    }
    out.converged = res.converged;
    out.evaluations = ev.evaluations;
    return out;
}

}  // namespace scarsim
