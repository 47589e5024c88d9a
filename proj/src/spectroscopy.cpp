#include "scarsim/spectroscopy.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "scarsim/operators.hpp"
#include "scarsim/parallel.hpp"

namespace scarsim {

GroundState ground_state(const SparseOperator& H, const CVector* start) {
    EigenPairs pairs = lowest_eigenpairs(H, 1, 1e-10, start);
    GroundState gs{pairs.values[0], pairs.vectors.front(), pairs.residuals.front()};
    if (gs.residual > 1e-10) fail(ErrorKind::Solver, "ground state residual " + std::to_string(gs.residual));
    return gs;
}

DispersionBand dispersion(int n_sites, double mu, int levels_per_sector, int levels_k0) {
    if (n_sites % 2 != 0) fail(ErrorKind::Shape, "dispersion requires an even number of sites");
    auto basis = std::make_shared<const ConstrainedBasis>(enumerate_basis(n_sites, BoundaryCondition::Periodic));
    DispersionBand band;
    band.n_sites = n_sites;
    band.mu = mu;
    const int half = n_sites / 2;
    std::vector<std::pair<int, Parity>> keys;
    for (int m = 0; m <= half; ++m) {
        if (m == 0 || m == half) {
            keys.emplace_back(m, Parity::Even);
            keys.emplace_back(m, Parity::Odd);
        } else {
            keys.emplace_back(m, Parity::None);
        }
    }
    std::vector<RVector> levels(keys.size());
    parallel_for(keys.size(), resolve_threads(0), [&](std::size_t i) {
        const auto [m, p] = keys[i];
        SymmetrySector sector(basis, m, p);
        if (sector.size() == 0) return;
        SparseOperator H = build_pxp(sector, {1.0, mu});
        int nev = (m == 0 && p == Parity::Even) ? levels_k0 : levels_per_sector;
        nev = std::min<int>(nev, static_cast<int>(sector.size()));
        levels[i] = lowest_eigenpairs(H, nev, 1e-9).values;
    });
    for (std::size_t i = 0; i < keys.size(); ++i)
        if (levels[i].size() > 0) band.sector_levels[{keys[i].first, static_cast<int>(keys[i].second)}] = levels[i];
    band.e_gs = std::numeric_limits<double>::infinity();
    for (const auto& [key, levels] : band.sector_levels) band.e_gs = std::min(band.e_gs, levels[0]);
    for (int m = 0; m <= half; ++m) {
        band.momenta.push_back(2.0 * std::numbers::pi * m / n_sites);
        band.energies.push_back(excitation_at(band, m));
    }
    return band;
}

double excitation_at(const DispersionBand& band, int m) {
    if (m > band.n_sites / 2) m = band.n_sites - m;
    double best = std::numeric_limits<double>::infinity();
    for (const auto& [key, levels] : band.sector_levels) {
        if (key.first != m) continue;
        for (Eigen::Index i = 0; i < levels.size(); ++i)
            if (levels[i] > band.e_gs + 1e-8) best = std::min(best, levels[i] - band.e_gs);
    }
    if (!std::isfinite(best)) fail(ErrorKind::Solver, "no level above the ground state in sector m=" + std::to_string(m));
    return best;
}

std::vector<PairPrediction> two_magnon_prediction(const DispersionBand& band, double e_gs) {
    std::vector<PairPrediction> out;
    for (std::size_t i = 0; i < band.momenta.size(); ++i)
        out.push_back({band.momenta[i], e_gs + 2.0 * band.energies[i]});
    return out;
}

double pair_deviation(const DispersionBand& band, int count) {
    auto preds = two_magnon_prediction(band, band.e_gs);
    std::vector<double> pred;
    for (std::size_t i = 1; i < preds.size(); ++i) pred.push_back(preds[i].energy);
    std::sort(pred.begin(), pred.end());
    const RVector& k0 = band.sector_levels.at({0, static_cast<int>(Parity::Even)});
    std::vector<double> exact;
    for (Eigen::Index i = 0; i < k0.size(); ++i)
        if (k0[i] > band.e_gs + 1e-8) exact.push_back(k0[i]);
    std::sort(exact.begin(), exact.end());
    const std::size_t n = std::min({static_cast<std::size_t>(count), pred.size(), exact.size()});
    if (n == 0) fail(ErrorKind::Solver, "no levels available for the pair comparison");
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) worst = std::max(worst, std::abs(pred[i] - exact[i]));
    return worst;
}

double band_flatness(const DispersionBand& band, double width) {
    auto spread = [&](double center) {
        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        for (std::size_t i = 0; i < band.momenta.size(); ++i) {
            if (std::abs(band.momenta[i] - center) <= width + 1e-12) {
                lo = std::min(lo, band.energies[i]);
                hi = std::max(hi, band.energies[i]);
            }
        }
        return hi - lo;
    };
    return spread(0.0) + spread(std::numbers::pi);
}

OverlapSpectrum overlap_spectrum(const CVector& psi0, const EigDecomposition& eig) {
    CVector c = eig.coefficients(psi0);
    OverlapSpectrum out;
    for (std::size_t j = 0; j < eig.dim(); ++j) {
        out.energies.push_back(eig.eigenvalues()[static_cast<Eigen::Index>(j)]);
        out.overlaps.push_back(std::norm(c[static_cast<Eigen::Index>(j)]));
    }
    return out;
}

std::vector<double> tower_markers(double e_gs, double eps_pi, int count) {
    std::vector<double> out;
    for (int m = 1; m <= count; ++m) out.push_back(e_gs + m * eps_pi);
    return out;
}

std::vector<TowerPeak> tower_peaks(const OverlapSpectrum& spec, double eps_pi, double min_overlap) {
    std::vector<std::size_t> order(spec.energies.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return spec.overlaps[a] > spec.overlaps[b]; });
    std::vector<TowerPeak> peaks;
    for (std::size_t i : order) {
        if (spec.overlaps[i] < min_overlap) break;
        bool near = std::any_of(peaks.begin(), peaks.end(),
                                [&](const TowerPeak& p) { return std::abs(p.energy - spec.energies[i]) <= 0.5 * eps_pi; });
        if (!near) peaks.push_back({spec.energies[i], spec.overlaps[i]});
    }
    std::sort(peaks.begin(), peaks.end(), [](const TowerPeak& a, const TowerPeak& b) { return a.energy < b.energy; });
    return peaks;
}

}  // namespace scarsim
