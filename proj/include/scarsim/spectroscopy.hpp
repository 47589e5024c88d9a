#pragma once

#include <map>
#include <utility>
#include <vector>

#include "scarsim/linalg.hpp"

namespace scarsim {

struct GroundState {
    double energy = 0.0;
    CVector state;
    double residual = 0.0;
};

// Lowest eigenpair with residual <= 1e-10; largest amplitude made real positive.
GroundState ground_state(const SparseOperator& H, const CVector* start = nullptr);

struct DispersionBand {
    int n_sites = 0;
    double mu = 0.0;
    double e_gs = 0.0;
    // k = 2 pi m / N for m = 0..N/2.
    std::vector<double> momenta;
    std::vector<double> energies;
    // Lowest levels of every resolved sector, keyed by (m, parity as int).
    std::map<std::pair<int, int>, RVector> sector_levels;
};

// levels_k0 extra levels are kept in the k = 0, p = +1 sector for pair comparisons.
DispersionBand dispersion(int n_sites, double mu, int levels_per_sector = 3, int levels_k0 = 10);
// Lowest level strictly above the ground state in momentum sector m (both parities merged).
double excitation_at(const DispersionBand& band, int m);

struct PairPrediction {
    double k;
    double energy;
};

// E_GS + eps(k) + eps(-k) for each k in the band.
std::vector<PairPrediction> two_magnon_prediction(const DispersionBand& band, double e_gs);

// Largest mismatch between the lowest `count` pair predictions (k != 0) and the lowest excited levels
// of the k = 0, p = +1 sector, both sorted.
double pair_deviation(const DispersionBand& band, int count);
// Spread of eps(k) over |k| <= width plus its spread over |k - pi| <= width.
double band_flatness(const DispersionBand& band, double width);

struct OverlapSpectrum {
    std::vector<double> energies;
    std::vector<double> overlaps;
};

OverlapSpectrum overlap_spectrum(const CVector& psi0, const EigDecomposition& eig);
std::vector<double> tower_markers(double e_gs, double eps_pi, int count);

struct TowerPeak {
    double energy;
    double overlap;
};

// Greedy peak grouping: states by descending overlap, a new peak when farther than half a magnon energy
// from all existing peaks; only overlaps >= min_overlap take part.
std::vector<TowerPeak> tower_peaks(const OverlapSpectrum& spec, double eps_pi, double min_overlap = 0.01);

}  // namespace scarsim
