#pragma once

#include <optional>
#include <string>
#include <vector>

#include "scarsim/basis.hpp"
#include "scarsim/observables.hpp"

namespace scarsim {

struct GridRange {
    double start = -6.0;
    double stop = 6.0;
    double step = 0.25;

    void validate() const;
    // start + i * step up to stop inclusive.
    std::vector<double> values() const;
    std::string str() const;
};

// "start:stop:step"
GridRange parse_range(const std::string& text);

struct SweepLayers {
    bool delta_f = true;
    bool msd_n = true;
    bool ipr = true;
    bool delta_n = true;
};

// Comma-separated subset of delta_f, msd_n, ipr, delta_n.
SweepLayers parse_layers(const std::string& text);
std::string layers_str(const SweepLayers& layers);

enum class EnsembleSpace { Full, Sector };

struct SweepConfig {
    int n_sites = 14;
    BoundaryCondition bc = BoundaryCondition::Periodic;
    GridRange mu_i;
    GridRange mu_f;
    WindowSpec fidelity_window = kFidelityWindow;
    WindowSpec msd_window = kMsdWindow;
    double dt = 0.05;
    double t_max = 20.0;
    SweepLayers layers;
    // Full: quench and ensembles in the whole constrained space; Sector: k = 0, p = +1 (PBC only).
    EnsembleSpace space = EnsembleSpace::Full;
    int threads = 0;
    std::string output = "sweep.csv";

    void validate() const;
};

SweepConfig parse_sweep_config(const std::string& json_text);
SweepConfig load_sweep_config(const std::string& path);

enum class CellStatus { Ok, Skipped, Failed };
const char* cell_status_name(CellStatus s);

struct SweepCell {
    double mu_i = 0.0;
    double mu_f = 0.0;
    std::optional<double> delta_f;
    std::optional<double> msd_n;
    std::optional<double> ipr;
    std::optional<double> delta_n;
    CellStatus status = CellStatus::Skipped;
    std::string message;
    // Thermal value clamped at the inverse-temperature cap.
    bool spectral_edge = false;
    double wall_seconds = 0.0;
};

struct SweepResult {
    std::vector<SweepCell> cells;
    int threads = 1;
    double wall_seconds = 0.0;
    double cell_seconds = 0.0;
    std::size_t dimension = 0;
    int degenerate_blocks = 0;
    int off_zero_blocks = 0;
};

// Cells in row-major order: mu_i outer, mu_f inner.
SweepResult run_sweep(const SweepConfig& config);

std::string metadata_path(const std::string& csv_path);
void write_csv(const SweepResult& result, const std::string& path);
void write_outputs(const SweepResult& result, const SweepConfig& config);

std::string version_string();

}  // namespace scarsim
