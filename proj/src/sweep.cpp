#include "scarsim/sweep.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <memory>
#include <sstream>

#include "json.hpp"
#include "scarsim/ensembles.hpp"
#include "scarsim/operators.hpp"
#include "scarsim/parallel.hpp"
#include "scarsim/spectroscopy.hpp"

namespace scarsim {

using json = nlohmann::json;

std::string version_string() { return "scarsim 1.0.0"; }

void GridRange::validate() const {
    if (!std::isfinite(start) || !std::isfinite(stop) || !std::isfinite(step))
        fail(ErrorKind::Config, "range bounds must be finite");
    if (!(step > 0.0)) fail(ErrorKind::Config, "range step must be positive");
    if (stop < start) fail(ErrorKind::Config, "range is empty: stop < start");
}

std::vector<double> GridRange::values() const {
    validate();
    const auto count = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
    std::vector<double> out(count);
    for (std::size_t i = 0; i < count; ++i) out[i] = start + static_cast<double>(i) * step;
    return out;
}

std::string GridRange::str() const {
    std::ostringstream os;
    os.precision(12);
    os << start << ':' << stop << ':' << step;
    return os.str();
}

GridRange parse_range(const std::string& text) {
    GridRange r;
    char c1 = 0, c2 = 0;
    std::istringstream is(text);
    if (!(is >> r.start >> c1 >> r.stop >> c2 >> r.step) || c1 != ':' || c2 != ':' || !(is >> std::ws).eof())
        fail(ErrorKind::Config, "range '" + text + "' is not start:stop:step");
    r.validate();
    return r;
}

SweepLayers parse_layers(const std::string& text) {
    SweepLayers l{false, false, false, false};
    std::istringstream is(text);
    std::string item;
    bool any = false;
    while (std::getline(is, item, ',')) {
        if (item == "delta_f") l.delta_f = true;
        else if (item == "msd_n") l.msd_n = true;
        else if (item == "ipr") l.ipr = true;
        else if (item == "delta_n") l.delta_n = true;
        else fail(ErrorKind::Config, "unknown layer '" + item + "'");
        any = true;
    }
    if (!any) fail(ErrorKind::Config, "no layers requested");
    return l;
}

std::string layers_str(const SweepLayers& l) {
    std::string s;
    auto add = [&](bool on, const char* name) {
        if (!on) return;
        if (!s.empty()) s += ',';
        s += name;
    };
    add(l.delta_f, "delta_f");
    add(l.msd_n, "msd_n");
    add(l.ipr, "ipr");
    add(l.delta_n, "delta_n");
    return s;
}

void SweepConfig::validate() const {
    if (n_sites < 1 || n_sites > 30) fail(ErrorKind::Config, "n_sites must lie in [1, 30]");
    mu_i.validate();
    mu_f.validate();
    fidelity_window.validate();
    msd_window.validate();
    if (!(dt > 0.0)) fail(ErrorKind::Config, "dt must be positive");
    if (fidelity_window.t1 > t_max + 1e-9 || msd_window.t1 > t_max + 1e-9)
        fail(ErrorKind::Config, "windows must end before t_max");
    if (space == EnsembleSpace::Sector && bc != BoundaryCondition::Periodic)
        fail(ErrorKind::Config, "sector ensemble space requires periodic boundaries");
    if (threads < 0) fail(ErrorKind::Config, "thread count must be non-negative");
}

namespace {

GridRange range_from_json(const json& j, const char* key) {
    if (j.is_string()) return parse_range(j.get<std::string>());
    if (j.is_array() && j.size() == 3) {
        GridRange r{j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
        r.validate();
        return r;
    }
    fail(ErrorKind::Config, std::string(key) + " must be \"start:stop:step\" or [start, stop, step]");
}

WindowSpec window_from_json(const json& j, const char* key) {
    if (!j.is_array() || j.size() != 2) fail(ErrorKind::Config, std::string(key) + " must be [t0, t1]");
    WindowSpec w{j[0].get<double>(), j[1].get<double>()};
    w.validate();
    return w;
}

}  // namespace

SweepConfig parse_sweep_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        fail(ErrorKind::Config, std::string("invalid JSON: ") + e.what());
    }
    if (!j.is_object()) fail(ErrorKind::Config, "config must be a JSON object");
    if (!j.contains("schema") || j["schema"] != 1) fail(ErrorKind::Config, "config requires \"schema\": 1");
    SweepConfig c;
    try {
        for (auto& [key, v] : j.items()) {
            if (key == "schema") continue;
            else if (key == "n_sites") c.n_sites = v.get<int>();
            else if (key == "bc") c.bc = parse_boundary(v.get<std::string>());
            else if (key == "mu_i_range") c.mu_i = range_from_json(v, "mu_i_range");
            else if (key == "mu_f_range") c.mu_f = range_from_json(v, "mu_f_range");
            else if (key == "fidelity_window") c.fidelity_window = window_from_json(v, "fidelity_window");
            else if (key == "msd_window") c.msd_window = window_from_json(v, "msd_window");
            else if (key == "dt") c.dt = v.get<double>();
            else if (key == "t_max") c.t_max = v.get<double>();
            else if (key == "layers") {
                std::string joined;
                if (v.is_string()) joined = v.get<std::string>();
                else
                    for (const auto& item : v) joined += (joined.empty() ? "" : ",") + item.get<std::string>();
                c.layers = parse_layers(joined);
            } else if (key == "ensemble_space") {
                const auto s = v.get<std::string>();
                if (s == "full") c.space = EnsembleSpace::Full;
                else if (s == "sector") c.space = EnsembleSpace::Sector;
                else fail(ErrorKind::Config, "ensemble_space must be full or sector");
            } else if (key == "threads") c.threads = v.get<int>();
            else if (key == "output") c.output = v.get<std::string>();
            else fail(ErrorKind::Config, "unknown config key '" + key + "'");
        }
    } catch (const json::exception& e) {
        fail(ErrorKind::Config, std::string("config value has the wrong type: ") + e.what());
    }
    c.validate();
    return c;
}

SweepConfig load_sweep_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::Io, "cannot read config " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_sweep_config(ss.str());
}

const char* cell_status_name(CellStatus s) {
    switch (s) {
        case CellStatus::Ok: return "ok";
        case CellStatus::Skipped: return "skipped";
        case CellStatus::Failed: return "failed";
    }
    return "unknown";
}

namespace {

struct QuenchSpace {
    std::shared_ptr<const ConstrainedBasis> basis;
    std::optional<SymmetrySector> sector;
    RVector density;

    SparseOperator hamiltonian(double mu) const {
        return sector ? build_pxp(*sector, {1.0, mu}) : build_pxp(*basis, {1.0, mu});
    }
};

struct Spectrum {
    EigDecomposition eig;
    std::unique_ptr<DiagonalEnsembleEvaluator> diag;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void evaluate_cell(const SweepConfig& cfg, const QuenchSpace& space, const Spectrum& spec, const CVector& psi0,
                   const std::vector<double>& times, SweepCell& cell) {
    const CVector c = spec.eig.coefficients(psi0);
    const RVector w = c.cwiseAbs2();
    const RVector& lam = spec.eig.eigenvalues();

    QuenchRecord rec;
    rec.times = times;
    if (cfg.layers.delta_f) {
        rec.fidelity.resize(times.size());
        for (std::size_t i = 0; i < times.size(); ++i) {
            const Eigen::ArrayXd ph = lam.array() * times[i];
            const double re = (w.array() * ph.cos()).sum();
            const double im = (w.array() * ph.sin()).sum();
            rec.fidelity[i] = std::min(1.0, re * re + im * im);
        }
        cell.delta_f = delta_F(rec, cfg.fidelity_window);
    }
    if (cfg.layers.ipr) cell.ipr = 1.0 / w.cwiseAbs2().sum();
    if (!cfg.layers.msd_n && !cfg.layers.delta_n) return;

    const double e_target = w.dot(lam);
    bool edge = false;
    const CanonicalResult th = thermal_value(lam, spec.diag->n_diag(), e_target, edge);
    cell.spectral_edge = edge;
    if (cfg.layers.delta_n) cell.delta_n = spec.diag->evaluate(c).n_bar - th.n_th;
    if (cfg.layers.msd_n) {
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < times.size(); ++i)
            if (times[i] >= cfg.msd_window.t0 - 1e-9 && times[i] <= cfg.msd_window.t1 + 1e-9) idx.push_back(i);
        Eigen::MatrixXcd phased(c.size(), static_cast<Eigen::Index>(idx.size()));
        for (std::size_t a = 0; a < idx.size(); ++a)
            for (Eigen::Index j = 0; j < c.size(); ++j)
                phased(j, static_cast<Eigen::Index>(a)) = c[j] * std::polar(1.0, -lam[j] * times[idx[a]]);
        const Eigen::MatrixXcd psi_t = spec.eig.reconstruct(phased);
        rec.density_n.assign(times.size(), std::nan(""));
        for (std::size_t a = 0; a < idx.size(); ++a)
            rec.density_n[idx[a]] = psi_t.col(static_cast<Eigen::Index>(a)).cwiseAbs2().dot(space.density);
        cell.msd_n = msd_n(rec, th.n_th, cfg.msd_window);
    }
}

}  // namespace

SweepResult run_sweep(const SweepConfig& cfg) {
    cfg.validate();
    const auto t_start = std::chrono::steady_clock::now();
    SweepResult result;
    result.threads = resolve_threads(cfg.threads);

    QuenchSpace space;
    space.basis = std::make_shared<const ConstrainedBasis>(enumerate_basis(cfg.n_sites, cfg.bc));
    if (cfg.space == EnsembleSpace::Sector) {
        space.sector.emplace(build_sector(space.basis, 0, Parity::Even));
        space.density = density_diagonal(*space.sector);
    } else {
        space.density = density_diagonal(*space.basis);
    }
    result.dimension = static_cast<std::size_t>(space.density.size());

    const std::vector<double> mu_i = cfg.mu_i.values();
    const std::vector<double> mu_f = cfg.mu_f.values();
    const std::vector<double> times = TimeGrid{0.0, cfg.t_max, cfg.dt}.points();

    std::vector<Spectrum> spectra(mu_f.size());
    parallel_for(mu_f.size(), result.threads, [&](std::size_t f) {
        spectra[f].eig = diagonalize(space.hamiltonian(mu_f[f]));
        spectra[f].diag = std::make_unique<DiagonalEnsembleEvaluator>(spectra[f].eig, space.density);
    });

    std::vector<std::optional<CVector>> ground(mu_i.size());
    std::vector<std::string> ground_error(mu_i.size());
    parallel_for(mu_i.size(), result.threads, [&](std::size_t i) {
        try {
            ground[i] = ground_state(space.hamiltonian(mu_i[i])).state;
        } catch (const Error& e) {
            ground_error[i] = e.what();
        }
    });

    result.cells.resize(mu_i.size() * mu_f.size());
    for (std::size_t i = 0; i < mu_i.size(); ++i)
        for (std::size_t f = 0; f < mu_f.size(); ++f) {
            auto& cell = result.cells[i * mu_f.size() + f];
            cell.mu_i = mu_i[i];
            cell.mu_f = mu_f[f];
        }
    parallel_for(result.cells.size(), result.threads, [&](std::size_t k) {
        const std::size_t i = k / mu_f.size(), f = k % mu_f.size();
        SweepCell& cell = result.cells[k];
        if (!ground[i]) {
            cell.status = CellStatus::Skipped;
            cell.message = ground_error[i];
            return;
        }
        const auto t0 = std::chrono::steady_clock::now();
        try {
            evaluate_cell(cfg, space, spectra[f], *ground[i], times, cell);
            cell.status = CellStatus::Ok;
        } catch (const Error& e) {
            cell.delta_f.reset();
            cell.msd_n.reset();
            cell.ipr.reset();
            cell.delta_n.reset();
            cell.status = CellStatus::Failed;
            cell.message = e.what();
        }
        cell.wall_seconds = seconds_since(t0);
    });

    for (const auto& s : spectra) {
        const DiagonalEnsemble& stats = s.diag->stats();
        result.degenerate_blocks = std::max(result.degenerate_blocks, stats.degenerate_blocks);
        result.off_zero_blocks = std::max(result.off_zero_blocks, stats.off_zero_blocks);
    }
    for (const auto& cell : result.cells) result.cell_seconds += cell.wall_seconds;
    result.wall_seconds = seconds_since(t_start);
    return result;
}

std::string metadata_path(const std::string& csv_path) {
    const std::string ext = ".csv";
    if (csv_path.size() > ext.size() && csv_path.compare(csv_path.size() - ext.size(), ext.size(), ext) == 0)
        return csv_path.substr(0, csv_path.size() - ext.size()) + ".json";
    return csv_path + ".json";
}

namespace {

std::string fmt12(const std::optional<double>& v) {
    if (!v) return "";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", *v);
    return buf;
}

}  // namespace

void write_csv(const SweepResult& result, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorKind::Io, "cannot open " + path + " for writing");
    out << "mu_i,mu_f,delta_f,msd_n,ipr,delta_n,status\n";
    for (const auto& c : result.cells)
        out << fmt12(c.mu_i) << ',' << fmt12(c.mu_f) << ',' << fmt12(c.delta_f) << ',' << fmt12(c.msd_n) << ','
            << fmt12(c.ipr) << ',' << fmt12(c.delta_n) << ',' << cell_status_name(c.status) << '\n';
    if (!out) fail(ErrorKind::Io, "write failed for " + path);
}

void write_outputs(const SweepResult& result, const SweepConfig& cfg) {
    write_csv(result, cfg.output);
    json meta;
    meta["schema"] = 1;
    meta["code_version"] = version_string();
    meta["config"] = {
        {"n_sites", cfg.n_sites},
        {"bc", boundary_name(cfg.bc)},
        {"mu_i_range", cfg.mu_i.str()},
        {"mu_f_range", cfg.mu_f.str()},
        {"fidelity_window", {cfg.fidelity_window.t0, cfg.fidelity_window.t1}},
        {"msd_window", {cfg.msd_window.t0, cfg.msd_window.t1}},
        {"dt", cfg.dt},
        {"t_max", cfg.t_max},
        {"layers", layers_str(cfg.layers)},
        {"ensemble_space", cfg.space == EnsembleSpace::Full ? "full" : "sector"},
        {"threads", cfg.threads},
        {"output", cfg.output},
    };
    meta["threads_used"] = result.threads;
    meta["dimension"] = result.dimension;
    meta["wall_time_s"] = result.wall_seconds;
    meta["cell_time_sum_s"] = result.cell_seconds;
    std::size_t ok = 0, failed = 0, skipped = 0, edge = 0;
    json failures = json::array();
    for (const auto& c : result.cells) {
        if (c.status == CellStatus::Ok) ++ok;
        else if (c.status == CellStatus::Failed) ++failed;
        else ++skipped;
        if (c.spectral_edge) ++edge;
        if (c.status != CellStatus::Ok) failures.push_back({{"mu_i", c.mu_i}, {"mu_f", c.mu_f}, {"message", c.message}});
    }
    meta["cells"] = {{"ok", ok}, {"failed", failed}, {"skipped", skipped}, {"spectral_edge", edge}};
    meta["failures"] = failures;
    meta["degenerate_blocks_max"] = result.degenerate_blocks;
    meta["off_zero_degenerate_blocks_max"] = result.off_zero_blocks;
    const std::string path = metadata_path(cfg.output);
    std::ofstream out(path);
    if (!out) fail(ErrorKind::Io, "cannot open " + path + " for writing");
    out << meta.dump(2) << '\n';
    if (!out) fail(ErrorKind::Io, "write failed for " + path);
}

}  // namespace scarsim
