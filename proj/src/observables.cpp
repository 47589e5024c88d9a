#include "scarsim/observables.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "scarsim/kernels.hpp"
#include "scarsim/operators.hpp"

namespace scarsim {

void WindowSpec::validate() const {
    if (!(t0 >= 0.0 && t1 > t0)) fail(ErrorKind::Window, "window must satisfy 0 <= t0 < t1");
}

double fidelity(const CVector& psi0, const CVector& psit) {
    if (psi0.size() != psit.size()) fail(ErrorKind::Basis, "fidelity arguments differ in dimension");
    cplx ov = kernels::active().dotc(static_cast<std::size_t>(psi0.size()), psi0.data(), psit.data());
    return std::clamp(std::norm(ov), 0.0, 1.0);
}

namespace {

std::vector<std::size_t> window_indices(const QuenchRecord& record, const WindowSpec& window) {
    window.validate();
    std::vector<std::size_t> idx;
    const double eps = 1e-9;
    for (std::size_t i = 0; i < record.times.size(); ++i)
        if (record.times[i] >= window.t0 - eps && record.times[i] <= window.t1 + eps) idx.push_back(i);
    if (idx.empty()) fail(ErrorKind::Window, "no samples inside the requested window");
    return idx;
}

}  // namespace

double delta_F(const QuenchRecord& record, const WindowSpec& window) {
    auto idx = window_indices(record, window);
    double lo = 1.0, hi = 0.0;
    for (auto i : idx) {
        lo = std::min(lo, record.fidelity[i]);
        hi = std::max(hi, record.fidelity[i]);
    }
    return std::max(0.0, hi - lo);
}

double excitation_density(const RVector& density_diag, const CVector& psi) {
    if (density_diag.size() != psi.size()) fail(ErrorKind::Basis, "state dimension does not match density operator");
    return kernels::active().weighted_norm2(static_cast<std::size_t>(psi.size()), density_diag.data(), psi.data());
}

double excitation_density(const ConstrainedBasis& basis, const CVector& psi) {
    return excitation_density(density_diagonal(basis), psi);
}

double msd_n(const QuenchRecord& record, double n_th, const WindowSpec& window) {
    auto idx = window_indices(record, window);
    if (idx.size() < 2) fail(ErrorKind::Window, "window needs at least two samples");
    double integral = 0.0;
    for (std::size_t a = 0; a + 1 < idx.size(); ++a) {
        const std::size_t i = idx[a], j = idx[a + 1];
        const double fi = std::pow(record.density_n[i] - n_th, 2);
        const double fj = std::pow(record.density_n[j] - n_th, 2);
        integral += 0.5 * (fi + fj) * (record.times[j] - record.times[i]);
    }
    const double span = record.times[idx.back()] - record.times[idx.front()];
    return integral / span;
}

double ipr(const CVector& psi0, const EigDecomposition& eig) {
    CVector c = eig.coefficients(psi0);
    double sum4 = c.cwiseAbs2().cwiseAbs2().sum();
    return 1.0 / sum4;
}

EntanglementCut::EntanglementCut(const ConstrainedBasis& basis, int cut) : dim_(basis.size()) {
    const int n = basis.n_sites();
    if (cut < 1 || cut > n - 1) fail(ErrorKind::Shape, "entanglement cut must lie in [1, N-1]");
    const Config mask = (Config{1} << cut) - 1;
    std::unordered_map<Config, int> lmap, rmap;
    left_.resize(dim_);
    right_.resize(dim_);
    for (std::size_t i = 0; i < dim_; ++i) {
        const Config s = basis.state(i);
        auto [li, lnew] = lmap.try_emplace(s & mask, static_cast<int>(lmap.size()));
        auto [ri, rnew] = rmap.try_emplace(s >> cut, static_cast<int>(rmap.size()));
        left_[i] = li->second;
        right_[i] = ri->second;
    }
    n_left_ = static_cast<int>(lmap.size());
    n_right_ = static_cast<int>(rmap.size());
}

RVector EntanglementCut::schmidt_weights(const CVector& psi, bool left_side) const {
    if (static_cast<std::size_t>(psi.size()) != dim_)
        fail(ErrorKind::Basis, "entanglement requires a full-basis state; expand sector states first");
    Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(n_left_, n_right_);
    for (std::size_t i = 0; i < dim_; ++i) M(left_[i], right_[i]) = psi[static_cast<Eigen::Index>(i)];
    Eigen::MatrixXcd rho = left_side ? Eigen::MatrixXcd(M * M.adjoint()) : Eigen::MatrixXcd(M.adjoint() * M);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho, Eigen::EigenvaluesOnly);
    RVector w = es.eigenvalues().cwiseMax(0.0);
    std::sort(w.data(), w.data() + w.size(), std::greater<>());
    return w;
}

double EntanglementCut::entropy(const CVector& psi, bool left_side) const {
    RVector w = schmidt_weights(psi, left_side);
    double s = 0.0;
    for (Eigen::Index i = 0; i < w.size(); ++i)
        if (w[i] > 1e-300) s -= w[i] * std::log(w[i]);
    return std::max(0.0, s);
}

double entanglement_entropy(const ConstrainedBasis& basis, const CVector& psi, int cut) {
    return EntanglementCut(basis, cut).entropy(psi);
}

namespace {

RevivalPeak refine_peak(const QuenchRecord& record, std::size_t i) {
    const auto& t = record.times;
    const auto& f = record.fidelity;
    // Parabola through three samples (not necessarily equally spaced).
    const double x0 = t[i - 1], x1 = t[i], x2 = t[i + 1];
    const double y0 = f[i - 1], y1 = f[i], y2 = f[i + 1];
    const double d01 = (y1 - y0) / (x1 - x0), d12 = (y2 - y1) / (x2 - x1);
    const double a = (d12 - d01) / (x2 - x0);
    const double b = d01 - a * (x0 + x1);
    const double c = y0 - a * x0 * x0 - b * x0;
    double tp = x1, fp = y1;
    if (a < 0.0) {
        tp = std::clamp(-b / (2.0 * a), x0, x2);
        fp = std::max(y1, a * tp * tp + b * tp + c);
    }
    return {tp, std::min(fp, 1.0)};
}

}  // namespace

RevivalPeak first_revival(const QuenchRecord& record, double t_min) {
    const auto& t = record.times;
    const auto& f = record.fidelity;
    for (std::size_t i = 1; i + 1 < t.size(); ++i) {
        if (t[i] <= t_min) continue;
        if (f[i] > f[i - 1] && f[i] > f[i + 1]) return refine_peak(record, i);
    }
    fail(ErrorKind::PeakDetection, "no fidelity maximum after t=" + std::to_string(t_min));
}

RevivalPeak dominant_revival(const QuenchRecord& record, const WindowSpec& window) {
    window.validate();
    const auto& t = record.times;
    const auto& f = record.fidelity;
    std::size_t best = 0;
    for (std::size_t i = 1; i + 1 < t.size(); ++i) {
        if (t[i] <= window.t0 || t[i] > window.t1) continue;
        if (f[i] > f[i - 1] && f[i] > f[i + 1] && (best == 0 || f[i] > f[best])) best = i;
    }
    if (best == 0) fail(ErrorKind::PeakDetection, "no fidelity maximum inside the window");
    return refine_peak(record, best);
}

double revival_peak_density(const QuenchRecord& record, int n_sites) {
    RevivalPeak peak = first_revival(record);
    if (!(peak.fidelity > 0.0)) fail(ErrorKind::PeakDetection, "revival peak has zero fidelity");
    return -std::log(peak.fidelity) / n_sites;
}

namespace {

void record_sample(QuenchRecord& rec, double t, const CVector& psi0, const CVector& psi, const RVector& dens,
                   const QuenchOptions& options) {
    rec.times.push_back(t);
    rec.fidelity.push_back(fidelity(psi0, psi));
    rec.density_n.push_back(excitation_density(dens, psi));
    if (options.entropy) rec.entropy.push_back(options.entropy(psi));
}

}  // namespace

QuenchRecord run_quench(const EigDecomposition& eig, const RVector& density_diag, const CVector& psi0,
                        const TimeGrid& grid, const QuenchOptions& options) {
    const auto pts = grid.points();
    Eigen::MatrixXcd states = evolve_exact_at(eig, psi0, pts);
    QuenchRecord rec;
    for (std::size_t i = 0; i < pts.size(); ++i)
        record_sample(rec, pts[i], psi0, states.col(static_cast<Eigen::Index>(i)), density_diag, options);
    return rec;
}

QuenchRecord run_quench(const SparseOperator& H, const RVector& density_diag, const CVector& psi0,
                        const TimeGrid& grid, const QuenchOptions& options) {
    const auto pts = grid.points();
    QuenchRecord rec;
    CVector psi = psi0;
    const double step_tol = options.tol / static_cast<double>(std::max<std::size_t>(1, pts.size()));
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (i > 0) psi = evolve_krylov(H, psi, pts[i] - pts[i - 1], step_tol);
        record_sample(rec, pts[i], psi0, psi, density_diag, options);
    }
    return rec;
}

}  // namespace scarsim
