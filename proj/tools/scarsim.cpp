#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "scarsim/ensembles.hpp"
#include "scarsim/observables.hpp"
#include "scarsim/operators.hpp"
#include "scarsim/parallel.hpp"
#include "scarsim/ramping.hpp"
#include "scarsim/spectroscopy.hpp"
#include "scarsim/sweep.hpp"
#include "scarsim/tdvp.hpp"

using namespace scarsim;
using json = nlohmann::json;

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string num(double v, int digits = 12) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

// CSV goes to --out when given, otherwise to stdout with notes moved to stderr.
class Output {
public:
    explicit Output(const std::string& path) : path_(path) {
        if (!path.empty()) {
            file_.open(path, std::ios::binary);
            if (!file_) fail(ErrorKind::Io, "cannot open " + path + " for writing");
        }
    }
    std::ostream& csv() { return path_.empty() ? std::cout : file_; }
    std::ostream& note() { return path_.empty() ? std::cerr : std::cout; }
    void close() {
        if (path_.empty()) return;
        file_.close();
        if (!file_) fail(ErrorKind::Io, "write failed for " + path_);
    }

private:
    std::string path_;
    std::ofstream file_;
};

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::Io, "cannot read config " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        fail(ErrorKind::Config, path + ": invalid JSON: " + e.what());
    }
    if (!j.is_object()) fail(ErrorKind::Config, path + ": config must be a JSON object");
    if (!j.contains("schema") || j["schema"] != 1) fail(ErrorKind::Config, path + ": config requires \"schema\": 1");
    return j;
}

// Config keys are flag names with '-' written as '_'; values only fill flags absent from the command line.
void merge_config(CLI::App* app, const std::string& path) {
    const json j = read_json_file(path);
    for (const auto& [key, value] : j.items()) {
        if (key == "schema") continue;
        std::string flag = "--" + key;
        for (auto& ch : flag)
            if (ch == '_') ch = '-';
        CLI::Option* opt = app->get_option_no_throw(flag);
        if (!opt || flag == "--config") fail(ErrorKind::Config, path + ": unknown key '" + key + "'");
        if (opt->count() > 0) continue;
        std::string text;
        if (value.is_string()) text = value.get<std::string>();
        else if (value.is_boolean()) text = value.get<bool>() ? "true" : "false";
        else if (value.is_number()) text = value.dump();
        else fail(ErrorKind::Config, path + ": key '" + key + "' must be a string, number or boolean");
        opt->add_result(text);
        opt->run_callback();
    }
}

void require(CLI::App* app, std::initializer_list<const char*> flags) {
    for (const char* f : flags)
        if (app->get_option(f)->count() == 0) throw UsageError(std::string("missing required flag ") + f);
}

bool given(CLI::App* app, const char* flag) { return app->get_option(flag)->count() > 0; }

struct SectorFlags {
    std::optional<int> k;
    std::string p = "none";

    void add(CLI::App* app) {
        app->add_option("--k", k, "Momentum quantum number m (k = 2 pi m / N); selects a symmetry sector");
        app->add_option("--p", p, "Inversion parity +1, -1 or none (requires k = 0 or N/2)")->capture_default_str();
    }
    bool active(CLI::App* app) const { return k.has_value() || given(app, "--p"); }
};

struct Common {
    int n = 0;
    std::string bc = "pbc";
    std::string out;
    std::string config;

    void add_n(CLI::App* app) { app->add_option("--n", n, "Number of sites (required)"); }
    void add_bc(CLI::App* app) {
        app->add_option("--bc", bc, "Boundary condition: pbc or obc")->capture_default_str();
    }
    void add_out(CLI::App* app, const char* what) {
        app->add_option("--out", out, std::string("Output file for ") + what + " (stdout when omitted)");
    }
    void add_config(CLI::App* app) {
        app->add_option("--config", config, "JSON config with \"schema\": 1; command-line flags take precedence");
    }
};

// ---- basis ----

int run_basis(CLI::App* app, Common& c, SectorFlags& sf, bool dump) {
    require(app, {"--n"});
    auto basis = std::make_shared<const ConstrainedBasis>(enumerate_basis(c.n, parse_boundary(c.bc)));
    std::vector<Config> states = basis->states();
    if (sf.active(app)) {
        SymmetrySector sector = build_sector(basis, sf.k.value_or(0), parse_parity(sf.p));
        states = sector.representatives();
    }
    std::cout << states.size() << '\n';
    if (dump) {
        const int width = (c.n + 3) / 4;
        for (Config s : states) {
            char buf[16];
            std::snprintf(buf, sizeof buf, "%0*x", std::max(width, 1), s);
            std::cout << buf << '\n';
        }
    }
    return 0;
}

// ---- hamiltonian ----

int run_hamiltonian(CLI::App* app, Common& c, SectorFlags& sf, double mu, bool dump_mm) {
    require(app, {"--n"});
    auto basis = std::make_shared<const ConstrainedBasis>(enumerate_basis(c.n, parse_boundary(c.bc)));
    SparseOperator H = sf.active(app)
                           ? build_pxp(build_sector(basis, sf.k.value_or(0), parse_parity(sf.p)), {1.0, mu})
                           : build_pxp(*basis, {1.0, mu});
    if (dump_mm) {
        Output out(c.out);
        H.write_matrix_market(out.csv());
        out.close();
        return 0;
    }
    std::cout << "basis " << H.tag().describe() << '\n'
              << "dim " << H.dim() << '\n'
              << "nnz " << H.nnz() << '\n'
              << "real " << (H.is_real() ? "yes" : "no") << '\n'
              << "hermiticity_error " << num(H.hermiticity_error(), 3) << '\n';
    return 0;
}

// ---- quench ----

struct QuenchFlags {
    double mu_i = 0.0, mu_f = 0.0, t_max = 20.0, dt = 0.05;
    std::string initial = "gs";
    int cut = 0;
};

int run_quench_cmd(CLI::App* app, Common& c, QuenchFlags& q) {
    require(app, {"--n", "--mu-f"});
    if (q.initial == "gs") require(app, {"--mu-i"});
    const BoundaryCondition bc = parse_boundary(c.bc);
    const ConstrainedBasis basis = enumerate_basis(c.n, bc);
    CVector psi0;
    if (q.initial == "gs") psi0 = ground_state(build_pxp(basis, {1.0, q.mu_i})).state;
    else if (q.initial == "z2") psi0 = z2_state(basis);
    else if (q.initial == "zplus") psi0 = zplus_state(basis);
    else if (q.initial == "polarized") psi0 = polarized_state(basis);
    else throw UsageError("--initial must be gs, z2, zplus or polarized");

    const int cut = q.cut > 0 ? q.cut : c.n / 2;
    std::unique_ptr<EntanglementCut> ent;
    QuenchOptions opts;
    if (c.n >= 2) {
        ent = std::make_unique<EntanglementCut>(basis, cut);
        opts.entropy = [&](const CVector& psi) { return ent->entropy(psi); };
    }
    const TimeGrid grid{0.0, q.t_max, q.dt};
    grid.validate();
    SparseOperator H = build_pxp(basis, {1.0, q.mu_f});
    const RVector density = density_diagonal(basis);
    QuenchRecord rec = basis.size() <= 3000 ? run_quench(diagonalize(H), density, psi0, grid, opts)
                                            : run_quench(H, density, psi0, grid, opts);

    Output out(c.out);
    out.csv() << "t,fidelity,n_density,entropy\n";
    for (std::size_t i = 0; i < rec.times.size(); ++i)
        out.csv() << num(rec.times[i]) << ',' << num(rec.fidelity[i]) << ',' << num(rec.density_n[i]) << ','
                  << (rec.entropy.empty() ? "" : num(rec.entropy[i])) << '\n';
    out.close();

    const WindowSpec w{kFidelityWindow.t0, std::min(kFidelityWindow.t1, q.t_max)};
    if (w.t1 > w.t0) out.note() << "delta_F[" << num(w.t0) << "," << num(w.t1) << "] " << num(delta_F(rec, w)) << '\n';
    try {
        const RevivalPeak peak = first_revival(rec);
        out.note() << "first_revival t=" << num(peak.time, 6) << " F=" << num(peak.fidelity, 6)
                   << " density=" << num(-std::log(peak.fidelity) / c.n, 6) << '\n';
    } catch (const Error&) {
        out.note() << "first_revival none\n";
    }
    return 0;
}

// ---- sweep ----

struct SweepFlags {
    int n = 14;
    std::string bc = "pbc", mu_i, mu_f, layers, space = "full", fidelity_window, msd_window, out, config;
    double dt = 0.05, t_max = 20.0;
    int threads = 0;
};

WindowSpec parse_window(const std::string& text) {
    WindowSpec w;
    char colon = 0;
    std::istringstream is(text);
    if (!(is >> w.t0 >> colon >> w.t1) || colon != ':' || !(is >> std::ws).eof())
        fail(ErrorKind::Config, "window '" + text + "' is not t0:t1");
    w.validate();
    return w;
}

int run_sweep_cmd(CLI::App* app, SweepFlags& s) {
    SweepConfig cfg = s.config.empty() ? SweepConfig{} : load_sweep_config(s.config);
    if (given(app, "--n")) cfg.n_sites = s.n;
    if (given(app, "--bc")) cfg.bc = parse_boundary(s.bc);
    if (given(app, "--mu-i-range")) cfg.mu_i = parse_range(s.mu_i);
    if (given(app, "--mu-f-range")) cfg.mu_f = parse_range(s.mu_f);
    if (given(app, "--dt")) cfg.dt = s.dt;
    if (given(app, "--t-max")) cfg.t_max = s.t_max;
    if (given(app, "--fidelity-window")) cfg.fidelity_window = parse_window(s.fidelity_window);
    if (given(app, "--msd-window")) cfg.msd_window = parse_window(s.msd_window);
    if (given(app, "--layers")) cfg.layers = parse_layers(s.layers);
    if (given(app, "--ensemble-space")) {
        if (s.space == "full") cfg.space = EnsembleSpace::Full;
        else if (s.space == "sector") cfg.space = EnsembleSpace::Sector;
        else throw UsageError("--ensemble-space must be full or sector");
    }
    if (given(app, "--threads")) cfg.threads = s.threads;
    if (given(app, "--out")) cfg.output = s.out;
    cfg.validate();
    const SweepResult result = run_sweep(cfg);
    write_outputs(result, cfg);
    std::size_t ok = 0;
    for (const auto& cell : result.cells) ok += cell.status == CellStatus::Ok;
    std::cout << "cells " << result.cells.size() << " ok " << ok << " threads " << result.threads << " wall_s "
              << num(result.wall_seconds, 4) << '\n'
              << "wrote " << cfg.output << " and " << metadata_path(cfg.output) << '\n';
    return 0;
}

// ---- tdvp-orbit / leakage-map ----

struct OrbitFlags {
    double mu = 0.0, theta0 = 0.0, phi0 = 0.0, t_max = 20.0, dt = 0.01, tol = kOrbitTol;
};

int run_orbit(CLI::App* app, Common& c, OrbitFlags& o) {
    require(app, {"--mu"});
    const TdvpOrbit orbit = integrate_orbit({o.theta0, o.phi0}, o.mu, o.t_max, o.tol, o.dt);
    Output out(c.out);
    out.csv() << "t,theta,phi,energy,leakage\n";
    for (std::size_t i = 0; i < orbit.times.size(); ++i)
        out.csv() << num(orbit.times[i]) << ',' << num(orbit.points[i].theta) << ',' << num(orbit.points[i].phi) << ','
                  << num(orbit.energy_density[i]) << ',' << num(leakage(orbit.points[i].theta)) << '\n';
    out.close();
    double drift = 0.0;
    for (double e : orbit.energy_density) drift = std::max(drift, std::abs(e - orbit.energy_density.front()));
    out.note() << "energy_drift " << num(drift, 3) << '\n';
    out.note() << "period " << (std::isnan(orbit.period) ? std::string("none") : num(orbit.period, 10)) << '\n';
    if (!orbit.turning_points.empty())
        out.note() << "first_turning t=" << num(orbit.turning_times[0], 10)
                   << " theta=" << num(orbit.turning_points[0].theta, 10)
                   << " phi=" << num(orbit.turning_points[0].phi, 10) << '\n';
    return 0;
}

int run_leakage_map(CLI::App* app, Common& c, int resolution, double mu) {
    if (resolution < 2) throw UsageError("--resolution must be at least 2");
    std::unique_ptr<ConstrainedBasis> basis;
    if (given(app, "--n")) basis = std::make_unique<ConstrainedBasis>(enumerate_basis(c.n, BoundaryCondition::Periodic));
    const double step = 2.0 * std::numbers::pi / resolution;
    std::vector<double> values(static_cast<std::size_t>(resolution) * resolution);
    parallel_for(values.size(), resolve_threads(0), [&](std::size_t idx) {
        const TdvpPoint p{-std::numbers::pi + step * static_cast<double>(idx / resolution),
                          -std::numbers::pi + step * static_cast<double>(idx % resolution)};
        values[idx] = basis ? finite_size_leakage(*basis, p, mu) : leakage(p.theta);
    });
    Output out(c.out);
    out.csv() << "theta,phi,leakage\n";
    for (std::size_t idx = 0; idx < values.size(); ++idx)
        out.csv() << num(-std::numbers::pi + step * static_cast<double>(idx / resolution)) << ','
                  << num(-std::numbers::pi + step * static_cast<double>(idx % resolution)) << ',' << num(values[idx])
                  << '\n';
    out.close();
    return 0;
}

// ---- dispersion / towers ----

int run_dispersion(CLI::App* app, Common& c, double mu, int levels) {
    require(app, {"--n", "--mu"});
    const DispersionBand band = dispersion(c.n, mu, levels, std::max(levels, c.n / 4 + 2));
    Output out(c.out);
    out.csv() << "m,k,epsilon\n";
    for (std::size_t i = 0; i < band.momenta.size(); ++i)
        out.csv() << i << ',' << num(band.momenta[i]) << ',' << num(band.energies[i]) << '\n';
    out.close();
    out.note() << "e_gs " << num(band.e_gs) << '\n'
               << "flatness " << num(band_flatness(band, std::numbers::pi / 5), 6) << '\n'
               << "pair_deviation " << num(pair_deviation(band, c.n / 4), 6) << '\n';
    return 0;
}

struct TowerFlags {
    double mu_i = kMuCritical, mu_f = 0.0, min_overlap = 0.01;
    int count = 3;
};

int run_towers(CLI::App* app, Common& c, TowerFlags& t) {
    require(app, {"--n", "--mu-f"});
    if (c.n % 2 != 0) throw UsageError("--n must be even for tower analysis");
    auto basis = std::make_shared<const ConstrainedBasis>(enumerate_basis(c.n, BoundaryCondition::Periodic));
    const SymmetrySector k0(basis, 0, Parity::Even);
    const CVector psi0 = ground_state(build_pxp(k0, {1.0, t.mu_i})).state;
    const EigDecomposition eig = diagonalize(build_pxp(k0, {1.0, t.mu_f}));
    const double e_gs = eig.eigenvalues()[0];
    double eps_pi = std::numeric_limits<double>::infinity();
    for (Parity p : {Parity::Even, Parity::Odd}) {
        const SymmetrySector s(basis, c.n / 2, p);
        if (s.size() == 0) continue;
        eps_pi = std::min(eps_pi, lowest_eigenpairs(build_pxp(s, {1.0, t.mu_f}), 1, 1e-10).values[0] - e_gs);
    }
    const OverlapSpectrum spec = overlap_spectrum(psi0, eig);
    Output out(c.out);
    out.csv() << "energy,overlap\n";
    for (std::size_t i = 0; i < spec.energies.size(); ++i)
        out.csv() << num(spec.energies[i]) << ',' << num(spec.overlaps[i]) << '\n';
    out.close();
    out.note() << "e_gs " << num(e_gs) << "\neps_pi " << num(eps_pi) << "\nmarkers";
    for (double m : tower_markers(e_gs, eps_pi, t.count)) out.note() << ' ' << num(m, 8);
    out.note() << '\n';
    for (const TowerPeak& p : tower_peaks(spec, eps_pi, t.min_overlap))
        out.note() << "peak energy=" << num(p.energy, 8) << " overlap=" << num(p.overlap, 6)
                   << " multiple=" << num((p.energy - e_gs) / eps_pi, 4) << '\n';
    return 0;
}

// ---- ensembles ----

int run_ensembles(CLI::App* app, Common& c, double mu_i, const std::string& range, const std::string& space) {
    require(app, {"--n", "--mu-i", "--mu-f-range"});
    const GridRange grid = parse_range(range);
    const BoundaryCondition bc = parse_boundary(c.bc);
    auto basis = std::make_shared<const ConstrainedBasis>(enumerate_basis(c.n, bc));
    std::unique_ptr<SymmetrySector> sector;
    if (space == "sector") sector = std::make_unique<SymmetrySector>(basis, 0, Parity::Even);
    else if (space != "full") throw UsageError("--space must be full or sector");
    auto hamiltonian = [&](double mu) { return sector ? build_pxp(*sector, {1.0, mu}) : build_pxp(*basis, {1.0, mu}); };
    const RVector density = sector ? density_diagonal(*sector) : density_diagonal(*basis);
    const CVector psi0 = ground_state(hamiltonian(mu_i)).state;

    const std::vector<double> mus = grid.values();
    struct Row {
        double beta, n_th, n_diag;
        bool edge;
    };
    std::vector<Row> rows(mus.size());
    parallel_for(mus.size(), resolve_threads(0), [&](std::size_t i) {
        const EigDecomposition eig = diagonalize(hamiltonian(mus[i]));
        const DiagonalEnsembleEvaluator diag(eig, density);
        const CVector coeff = eig.coefficients(psi0);
        const double e_target = coeff.cwiseAbs2().dot(eig.eigenvalues());
        bool edge = false;
        const CanonicalResult th = thermal_value(eig.eigenvalues(), diag.n_diag(), e_target, edge);
        rows[i] = {th.beta, th.n_th, diag.evaluate(coeff).n_bar, edge};
    });
    Output out(c.out);
    out.csv() << "mu_f,beta,n_th,n_diag,delta_n\n";
    for (std::size_t i = 0; i < mus.size(); ++i)
        out.csv() << num(mus[i]) << ',' << num(rows[i].beta) << ',' << num(rows[i].n_th) << ',' << num(rows[i].n_diag)
                  << ',' << num(rows[i].n_diag - rows[i].n_th) << '\n';
    out.close();
    for (std::size_t i = 0; i < mus.size(); ++i)
        if (rows[i].edge) std::cerr << "warning: mu_f=" << num(mus[i]) << " target energy at the spectral edge, beta clamped\n";
    return 0;
}

// ---- ramp ----

struct RampFlags {
    double target = 0.0, A = -40.0, B = 30.0, C = -0.1, t_max = 25.0;
    bool keep_sign = false, sector = false;
    std::string initial = "auto";
};

int run_ramp(CLI::App* app, Common& c, RampFlags& r) {
    require(app, {"--n", "--target-mu"});
    RampSchedule schedule = r.keep_sign ? RampSchedule{r.A, r.B, r.C, kMuCritical}
                                        : schedule_for_target(r.A, r.B, r.C, r.target);
    RampOptions opts;
    opts.bc = parse_boundary(c.bc);
    opts.sector = r.sector;
    opts.initial = parse_initial(r.initial);
    opts.t_max = r.t_max;
    const RampResult res = ramp_prepare(c.n, schedule, r.target, opts);
    Output out(c.out);
    out.csv() << "t,mu,overlap\n";
    for (const RampSample& s : res.trace) out.csv() << num(s.t) << ',' << num(s.mu) << ',' << num(s.overlap) << '\n';
    out.close();
    out.note() << "target_mu=" << num(r.target) << " A=" << num(schedule.A) << " initial=" << initial_name(res.initial)
               << " t_ramp=" << num(res.t_ramp, 8) << " overlap=" << num(res.overlap, 10) << '\n';
    return 0;
}

std::size_t edit_distance(const std::string& a, const std::string& b) {
    std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
    for (std::size_t i = 1; i <= a.size(); ++i) {
        cur[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j)
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1)});
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

void suggest(const CLI::App& app, int argc, char** argv) {
    const CLI::App* sub = nullptr;
    for (const CLI::App* s : app.get_subcommands()) sub = s;
    if (!sub) return;
    for (int i = 1; i < argc; ++i) {
        std::string arg = argv[i];
        if (arg.rfind("--", 0) != 0) continue;
        arg = arg.substr(0, arg.find('='));
        if (sub->get_option_no_throw(arg)) continue;
        std::string best;
        std::size_t best_d = 4;
        for (const CLI::Option* opt : sub->get_options()) {
            for (const auto& name : opt->get_lnames()) {
                const std::size_t d = edit_distance(arg.substr(2), name);
                if (d < best_d) {
                    best_d = d;
                    best = "--" + name;
                }
            }
        }
        if (!best.empty()) std::cerr << "unknown flag " << arg << "; did you mean " << best << "?\n";
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Constrained Rydberg chain simulator"};
    app.require_subcommand(1);
    app.set_version_flag("--version", version_string());

    Common c;
    SectorFlags sf;
    std::function<int()> action;

    auto* basis = app.add_subcommand("basis", "Print the constrained Hilbert-space dimension");
    bool dump = false;
    c.add_n(basis);
    c.add_bc(basis);
    sf.add(basis);
    basis->add_flag("--dump", dump, "Also print every state (or sector representative) as hex, one per line");
    c.add_config(basis);
    basis->callback([&] { action = [&] { return run_basis(basis, c, sf, dump); }; });

    auto* ham = app.add_subcommand("hamiltonian", "Build H = sum PXP + mu sum n and report or dump it");
    double mu = 0.0;
    bool dump_mm = false;
    c.add_n(ham);
    c.add_bc(ham);
    ham->add_option("--mu", mu, "Chemical potential")->capture_default_str();
    sf.add(ham);
    ham->add_flag("--dump-mm", dump_mm, "Emit the matrix in Matrix Market coordinate format");
    c.add_out(ham, "the Matrix Market dump");
    c.add_config(ham);
    ham->callback([&] { action = [&] { return run_hamiltonian(ham, c, sf, mu, dump_mm); }; });

    auto* quench = app.add_subcommand("quench", "Global quench from a ground state or product state");
    QuenchFlags qf;
    c.add_n(quench);
    c.add_bc(quench);
    quench->add_option("--mu-i", qf.mu_i, "Initial chemical potential (ground state is prepared)");
    quench->add_option("--mu-f", qf.mu_f, "Post-quench chemical potential (required)");
    quench->add_option("--t-max", qf.t_max, "Final time")->capture_default_str();
    quench->add_option("--dt", qf.dt, "Sampling interval")->capture_default_str();
    quench->add_option("--initial", qf.initial, "Initial state: gs, z2, zplus or polarized")->capture_default_str();
    quench->add_option("--cut", qf.cut, "Entanglement cut position (default N/2)");
    c.add_out(quench, "the t,fidelity,n_density,entropy table");
    c.add_config(quench);
    quench->callback([&] { action = [&] { return run_quench_cmd(quench, c, qf); }; });

    auto* sweep = app.add_subcommand("sweep", "Dynamical phase diagram over a (mu_i, mu_f) grid");
    SweepFlags sw;
    sweep->add_option("--config", sw.config, "JSON sweep config with \"schema\": 1; flags take precedence");
    sweep->add_option("--n", sw.n, "Number of sites")->capture_default_str();
    sweep->add_option("--bc", sw.bc, "Boundary condition: pbc or obc")->capture_default_str();
    sweep->add_option("--mu-i-range", sw.mu_i, "Initial mu grid start:stop:step (default -6:6:0.25)");
    sweep->add_option("--mu-f-range", sw.mu_f, "Final mu grid start:stop:step (default -6:6:0.25)");
    sweep->add_option("--dt", sw.dt, "Sampling interval")->capture_default_str();
    sweep->add_option("--t-max", sw.t_max, "Final time")->capture_default_str();
    sweep->add_option("--fidelity-window", sw.fidelity_window, "Fidelity window t0:t1 (default 1:20)");
    sweep->add_option("--msd-window", sw.msd_window, "Density window t0:t1 (default 10:20)");
    sweep->add_option("--layers", sw.layers, "Comma list of delta_f,msd_n,ipr,delta_n (default all)");
    sweep->add_option("--ensemble-space", sw.space, "full or sector (k = 0, p = +1)")->capture_default_str();
    sweep->add_option("--threads", sw.threads, "Worker threads, 0 for all cores; SCARSIM_THREADS overrides");
    sweep->add_option("--out", sw.out, "CSV path (default sweep.csv); metadata goes next to it as .json");
    sweep->callback([&] { action = [&] { return run_sweep_cmd(sweep, sw); }; });

    auto* orbit = app.add_subcommand("tdvp-orbit", "Integrate the K = 1 variational equations of motion");
    OrbitFlags of;
    orbit->add_option("--mu", of.mu, "Chemical potential (required)");
    orbit->add_option("--theta0", of.theta0, "Initial theta")->capture_default_str();
    orbit->add_option("--phi0", of.phi0, "Initial phi")->capture_default_str();
    orbit->add_option("--t-max", of.t_max, "Final time")->capture_default_str();
    orbit->add_option("--dt", of.dt, "Output interval")->capture_default_str();
    orbit->add_option("--tol", of.tol, "Integrator tolerance")->capture_default_str();
    c.add_out(orbit, "the t,theta,phi,energy,leakage table");
    c.add_config(orbit);
    orbit->callback([&] { action = [&] { return run_orbit(orbit, c, of); }; });

    auto* lmap = app.add_subcommand("leakage-map", "Leakage rate on a (theta, phi) grid");
    int resolution = 64;
    double lmu = 0.0;
    lmap->add_option("--resolution", resolution, "Grid points per angle")->capture_default_str();
    lmap->add_option("--n", c.n, "Evaluate numerically on an N-site chain instead of the closed form");
    lmap->add_option("--mu", lmu, "Chemical potential for the numerical evaluation")->capture_default_str();
    c.add_out(lmap, "the theta,phi,leakage table");
    c.add_config(lmap);
    lmap->callback([&] { action = [&] { return run_leakage_map(lmap, c, resolution, lmu); }; });

    auto* disp = app.add_subcommand("dispersion", "Single-magnon dispersion from momentum-sector spectra");
    double dmu = 0.0;
    int levels = 3;
    c.add_n(disp);
    disp->add_option("--mu", dmu, "Chemical potential (required)");
    disp->add_option("--levels", levels, "Levels per momentum sector")->capture_default_str();
    c.add_out(disp, "the m,k,epsilon table");
    c.add_config(disp);
    disp->callback([&] { action = [&] { return run_dispersion(disp, c, dmu, levels); }; });

    auto* towers = app.add_subcommand("towers", "Overlap spectrum of a quenched ground state in the k = 0 sector");
    TowerFlags tf;
    c.add_n(towers);
    towers->add_option("--mu-i", tf.mu_i, "Initial chemical potential")->capture_default_str();
    towers->add_option("--mu-f", tf.mu_f, "Post-quench chemical potential (required)");
    towers->add_option("--count", tf.count, "Number of tower markers")->capture_default_str();
    towers->add_option("--min-overlap", tf.min_overlap, "Smallest overlap considered for peaks")->capture_default_str();
    c.add_out(towers, "the energy,overlap table");
    c.add_config(towers);
    towers->callback([&] { action = [&] { return run_towers(towers, c, tf); }; });

    auto* ens = app.add_subcommand("ensembles", "Diagonal versus canonical density over a mu_f range");
    double emu_i = 0.0;
    std::string erange, espace = "full";
    c.add_n(ens);
    c.add_bc(ens);
    ens->add_option("--mu-i", emu_i, "Initial chemical potential (required)");
    ens->add_option("--mu-f-range", erange, "start:stop:step (required)");
    ens->add_option("--space", espace, "Ensemble space: full or sector (k = 0, p = +1)")->capture_default_str();
    c.add_out(ens, "the mu_f,beta,n_th,n_diag,delta_n table");
    c.add_config(ens);
    ens->callback([&] { action = [&] { return run_ensembles(ens, c, emu_i, erange, espace); }; });

    auto* ramp = app.add_subcommand("ramp", "Ground-state preparation by a chemical-potential ramp");
    RampFlags rf;
    c.add_n(ramp);
    c.add_bc(ramp);
    ramp->add_option("--target-mu", rf.target, "Target chemical potential (required)");
    ramp->add_option("--A", rf.A, "Ramp amplitude; its sign is chosen from the target unless --keep-sign")
        ->capture_default_str();
    ramp->add_option("--B", rf.B, "Late pole position")->capture_default_str();
    ramp->add_option("--C", rf.C, "Early pole position")->capture_default_str();
    ramp->add_flag("--keep-sign", rf.keep_sign, "Use --A exactly as given");
    ramp->add_option("--t-max", rf.t_max, "End of the ramp window")->capture_default_str();
    ramp->add_option("--initial", rf.initial, "auto, z2, zplus or polarized")->capture_default_str();
    ramp->add_flag("--sector", rf.sector, "Evolve in the k = 0, p = +1 sector");
    c.add_out(ramp, "the t,mu,overlap trace");
    c.add_config(ramp);
    ramp->callback([&] { action = [&] { return run_ramp(ramp, c, rf); }; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        if (dynamic_cast<const CLI::ExtrasError*>(&e)) suggest(app, argc, argv);
        return code == 0 ? 0 : 1;
    }

    try {
        for (CLI::App* sub : app.get_subcommands())
            if (!c.config.empty() && sub->get_option_no_throw("--config") && sub != sweep) merge_config(sub, c.config);
        return action();
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\nRun with --help for usage.\n";
        return 1;
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return e.kind() == ErrorKind::Config ? 1 : 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
