#include <Eigen/QR>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numbers>
#include <set>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "scarsim/ensembles.hpp"
#include "scarsim/observables.hpp"
#include "scarsim/parallel.hpp"
#include "scarsim/ramping.hpp"
#include "scarsim/spectroscopy.hpp"
#include "scarsim/sweep.hpp"
#include "scarsim/tdvp.hpp"

using namespace scarsim;

namespace {

constexpr double kPi = std::numbers::pi;
const BoundaryCondition PBC = BoundaryCondition::Periodic;
const BoundaryCondition OBC = BoundaryCondition::Open;

struct Outcome {
    bool pass = true;
    std::string detail;

    void check(bool ok, const std::string& what) {
        pass = pass && ok;
        add(what + (ok ? "" : " [fail]"));
    }
    void add(const std::string& what) {
        if (!detail.empty()) detail += "; ";
        detail += what;
    }
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

double elapsed(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double overlap2(const CVector& a, const CVector& b) {
    return std::norm(a.dot(b)) / (a.squaredNorm() * b.squaredNorm());
}

Outcome basis_oracle() {
    Outcome out;
    const auto t0 = std::chrono::steady_clock::now();
    int mismatches = 0;
    for (BoundaryCondition bc : {PBC, OBC}) {
        for (int n = 1; n <= 14; ++n) {
            const auto brute = oracle::brute_basis(n, bc == PBC);
            const ConstrainedBasis b = enumerate_basis(n, bc);
            const std::vector<Config> got(b.states().begin(), b.states().end());
            const std::vector<Config> want(brute.begin(), brute.end());
            if (got != want || dimension(n, bc) != want.size()) ++mismatches;
        }
    }
    const double secs = elapsed(t0);
    out.check(mismatches == 0, fmt("%d mismatching (N, bc) pairs over N=1..14", mismatches));
    out.check(secs < 10.0, fmt("%.2f s", secs));
    return out;
}

Outcome spectral_reflection() {
    Outcome out;
    double worst = 0.0;
    for (BoundaryCondition bc : {PBC, OBC}) {
        const ConstrainedBasis b = enumerate_basis(12, bc);
        for (double mu : {0.5, 1.31, 3.0}) {
            std::vector<double> plus = oracle::sorted(diagonalize(build_pxp(b, {1.0, mu})).eigenvalues());
            std::vector<double> minus = oracle::sorted(diagonalize(build_pxp(b, {1.0, -mu})).eigenvalues());
            for (double& e : minus) e = -e;
            std::sort(minus.begin(), minus.end());
            for (std::size_t i = 0; i < plus.size(); ++i) worst = std::max(worst, std::abs(plus[i] - minus[i]));
        }
    }
    out.check(worst <= 1e-10, fmt("max |spec(H(-mu)) + spec(H(mu))| = %.2e at N=12, pbc and obc", worst));
    return out;
}

struct Extrapolation {
    double limit;
    double ratio;
};

// gamma_N = g + (a + b N) r^N, linear in (g, a, b) for fixed r; r scanned on a fine grid.
Extrapolation extrapolate(const std::vector<int>& ns, const std::vector<double>& gs) {
    Extrapolation best{gs.back(), 0.0};
    double best_res = std::numeric_limits<double>::infinity();
    const auto m = static_cast<Eigen::Index>(ns.size());
    Eigen::VectorXd y(m);
    for (Eigen::Index i = 0; i < m; ++i) y[i] = gs[static_cast<std::size_t>(i)];
    for (double r = 0.05; r < 0.99; r += 0.001) {
        Eigen::MatrixXd A(m, 3);
        for (Eigen::Index i = 0; i < m; ++i) {
            const double n = ns[static_cast<std::size_t>(i)];
            A(i, 0) = 1.0;
            A(i, 1) = std::pow(r, n);
            A(i, 2) = n * std::pow(r, n);
        }
        const Eigen::VectorXd x = A.colPivHouseholderQr().solve(y);
        const double res = (A * x - y).norm();
        if (res < best_res) {
            best_res = res;
            best = {x[0], r};
        }
    }
    return best;
}

Outcome tdvp_identities() {
    Outcome out;
    double worst_turn = 0.0, worst_drift = 0.0;
    for (double mu : {0.5, 1.6, 3.0}) {
        const TdvpOrbit o = integrate_orbit({0.0, 0.0}, mu, 20.0);
        for (double e : o.energy_density) worst_drift = std::max(worst_drift, std::abs(e - energy_density({0.0, 0.0}, mu)));
        if (o.turning_points.empty()) {
            out.check(false, fmt("no turning point at mu=%g", mu));
            continue;
        }
        const TdvpPoint a = antipodal_point(mu), t = o.turning_points[0];
        const double du = std::sin(a.theta) * std::cos(a.phi) - std::sin(t.theta) * std::cos(t.phi);
        const double dv = std::sin(a.theta) * std::sin(a.phi) - std::sin(t.theta) * std::sin(t.phi);
        worst_turn = std::max(worst_turn, std::hypot(du, dv));
    }
    out.check(worst_turn < 1e-6, fmt("turning point vs antipodal point %.1e", worst_turn));
    out.check(worst_drift < 1e-8, fmt("energy drift %.1e", worst_drift));

    const std::vector<int> ns{8, 10, 12, 14, 16};
    std::vector<ConstrainedBasis> bases;
    for (int n : ns) bases.push_back(enumerate_basis(n, PBC));
    std::string rows;
    bool leak_ok = true;
    for (double theta : {0.2, 0.4, 0.6, 0.8, 1.0, 1.2, 1.4}) {
        std::vector<double> gs;
        for (const ConstrainedBasis& b : bases) gs.push_back(finite_size_leakage(b, {theta, 0.3}));
        const Extrapolation ex = extrapolate(ns, gs);
        const double exact = leakage(theta);
        const double rel = (ex.limit - exact) / exact;
        leak_ok = leak_ok && std::abs(rel) <= 0.02;
        rows += fmt("%s%.1f:%+.2f%%", rows.empty() ? "" : " ", theta, 100.0 * rel);
    }
    out.check(leak_ok, "leakage extrapolation N=8..16 vs closed form, theta:rel.err " + rows);
    return out;
}

Outcome manifold_anchors() {
    Outcome out;
    double worst = 0.0;
    for (int n : {8, 12}) {
        const ConstrainedBasis b = enumerate_basis(n, PBC);
        worst = std::max(worst, 1.0 - overlap2(mps_state(b, {0.0, 0.0}), polarized_state(b)));
        worst = std::max(worst, 1.0 - overlap2(mps_state(b, {kPi / 2, kPi / 2}), zplus_state(b)));
    }
    out.check(worst <= 1e-12, fmt("max 1 - overlap %.1e at N=8,12", worst));
    return out;
}

Outcome region_two_mapping() {
    Outcome out;
    const auto t0 = std::chrono::steady_clock::now();
    const ConstrainedBasis b20 = enumerate_basis(20, PBC);
    std::string rows;
    double worst = 1.0;
    for (double mu : {0.0, 0.5, 1.0, 1.5, 2.0}) {
        const double o = project_to_manifold(b20, ground_state(build_pxp(b20, {1.0, mu})).state).overlap;
        worst = std::min(worst, o);
        rows += fmt("%s%g:%.4f", rows.empty() ? "" : " ", mu, o);
    }
    out.check(worst > 0.95, "N=20 overlaps mu_i:overlap " + rows);
    std::string info;
    for (double mu : {-0.5, -0.76}) {
        const double o = project_to_manifold(b20, ground_state(build_pxp(b20, {1.0, mu})).state).overlap;
        info += fmt("%s%g:%.4f", info.empty() ? "" : " ", mu, o);
    }
    out.add("unasserted " + info);
    std::vector<double> crit;
    std::string series;
    for (int n : {12, 14, 16, 18, 20}) {
        const ConstrainedBasis b = enumerate_basis(n, PBC);
        crit.push_back(project_to_manifold(b, ground_state(build_pxp(b, {1.0, kMuCritical})).state).overlap);
        series += fmt("%s%d:%.4f", series.empty() ? "" : " ", n, crit.back());
    }
    bool mono = true;
    for (std::size_t i = 1; i < crit.size(); ++i) mono = mono && crit[i] < crit[i - 1];
    out.check(mono, "critical match decreasing N:overlap " + series);
    const double secs = elapsed(t0);
    out.check(secs < 600.0, fmt("%.0f s", secs));
    return out;
}

Outcome critical_quench() {
    Outcome out;
    const double random_baseline = std::log((1.0 + std::sqrt(5.0)) / 2.0);
    std::vector<double> dens;
    std::string rows;
    bool times_ok = true;
    for (int n : {12, 16, 20}) {
        const ConstrainedBasis b = enumerate_basis(n, OBC);
        const CVector psi0 = ground_state(build_pxp(b, {1.0, kMuCritical})).state;
        const SparseOperator H = build_pxp(b, {1.0, 0.6});
        const QuenchRecord rec = run_quench(H, density_diagonal(b), psi0, {0.0, 10.0, 0.05});
        const RevivalPeak dom = dominant_revival(rec, {1.0, 10.0});
        const RevivalPeak first = first_revival(rec);
        dens.push_back(revival_peak_density(rec, n));
        times_ok = times_ok && dom.time >= 3.5 && dom.time <= 6.5;
        rows += fmt("%sN=%d main t=%.2f F=%.3f first t=%.2f density=%.4f", rows.empty() ? "" : " | ", n, dom.time,
                    dom.fidelity, first.time, dens.back());
    }
    out.add(rows);
    out.check(times_ok, "main revival in [3.5, 6.5]");
    out.check(dens[1] < dens[0] && dens[2] < dens[1], "revival density decreasing with N");
    out.check(*std::max_element(dens.begin(), dens.end()) < random_baseline, fmt("all below %.4f", random_baseline));
    return out;
}

Outcome magnon_analysis() {
    Outcome out;
    const std::vector<double> mus{0.1, 0.6, 1.2};
    std::vector<double> flat, pair;
    std::string rows;
    for (double mu : mus) {
        const DispersionBand band = dispersion(24, mu, 3, 8);
        flat.push_back(band_flatness(band, kPi / 5));
        pair.push_back(pair_deviation(band, 6));
        rows += fmt("%smu=%g flat=%.3f pair=%.3f", rows.empty() ? "" : " ", mu, flat.back(), pair.back());
    }
    out.add("N=24 " + rows);
    out.check(flat[1] < flat[0] && flat[1] < flat[2], "flatness minimal at 0.6");
    out.check(pair[1] < pair[0] && pair[1] < pair[2], "pair deviation minimal at 0.6");

    auto basis = std::make_shared<const ConstrainedBasis>(enumerate_basis(20, PBC));
    const SymmetrySector k0(basis, 0, Parity::Even);
    const CVector psi0 = ground_state(build_pxp(k0, {1.0, kMuCritical})).state;
    const double mu_f = 0.633;
    const EigDecomposition eig = diagonalize(build_pxp(k0, {1.0, mu_f}));
    const double e_gs = eig.eigenvalues()[0];
    double eps_pi = std::numeric_limits<double>::infinity();
    for (Parity p : {Parity::Even, Parity::Odd}) {
        const SymmetrySector s(basis, 10, p);
        if (s.size() == 0) continue;
        eps_pi = std::min(eps_pi, lowest_eigenpairs(build_pxp(s, {1.0, mu_f}), 1, 1e-10).values[0] - e_gs);
    }
    std::vector<TowerPeak> peaks = tower_peaks(overlap_spectrum(psi0, eig), eps_pi, 0.01);
    std::sort(peaks.begin(), peaks.end(), [](const TowerPeak& a, const TowerPeak& b) { return a.energy < b.energy; });
    bool towers_ok = peaks.size() >= 4;
    std::string multiples;
    for (std::size_t j = 1; j < std::min<std::size_t>(peaks.size(), 4); ++j) {
        const double m = (peaks[j].energy - e_gs) / eps_pi;
        towers_ok = towers_ok && std::abs(m - 2.0 * static_cast<double>(j)) <= 0.1 * 2.0 * static_cast<double>(j);
        multiples += fmt("%s%.3f", multiples.empty() ? "" : " ", m);
    }
    out.check(towers_ok, fmt("N=20 towers at multiples of eps(pi)=%.4f: ", eps_pi) + multiples);
    return out;
}

Outcome ensembles() {
    Outcome out;
    {
        const ConstrainedBasis b = enumerate_basis(12, PBC);
        const RVector d = density_diagonal(b);
        const CVector psi0 = ground_state(build_pxp(b, {1.0, kMuCritical})).state;
        const EigDecomposition eig = diagonalize(build_pxp(b, {1.0, 0.6}));
        std::vector<double> times;
        for (double t = 0.0; t <= 2000.0; t += 0.25) times.push_back(t);
        const Eigen::MatrixXcd states = evolve_exact_at(eig, psi0, times);
        double avg = 0.0;
        for (Eigen::Index j = 0; j < states.cols(); ++j) avg += states.col(j).cwiseAbs2().dot(d);
        avg /= static_cast<double>(states.cols());
        const double nbar = diagonal_ensemble_n(psi0, eig, d);
        out.check(std::abs(nbar - avg) <= 1e-3, fmt("N=12 diagonal %.6f vs T=2000 average %.6f", nbar, avg));
    }
    const ConstrainedBasis b = enumerate_basis(16, PBC);
    const RVector d = density_diagonal(b);
    auto delta_n = [&](double mu_i, double mu_f) {
        const CVector psi0 = ground_state(build_pxp(b, {1.0, mu_i})).state;
        return ensemble_gap(psi0, diagonalize(build_pxp(b, {1.0, mu_f})), d).delta_n;
    };
    const double r1 = delta_n(-2.0, 0.25), r2 = delta_n(-0.76, 1.6), r3 = delta_n(3.0, 1.5);
    out.check(r1 > 0.0 && r2 < 0.0 && r3 < 0.0,
              fmt("N=16 delta_n region(1) %+.4f region(2) %+.4f region(3) %+.4f", r1, r2, r3));

    const CVector psi0 = ground_state(build_pxp(b, {1.0, kMuCritical})).state;
    std::vector<double> mus;
    for (int i = 0; i <= 40; ++i) mus.push_back(-2.0 + 0.1 * i);
    std::vector<double> gap(mus.size());
    std::vector<char> edge(mus.size(), 0);
    parallel_for(mus.size(), resolve_threads(0), [&](std::size_t i) {
        const EigDecomposition eig = diagonalize(build_pxp(b, {1.0, mus[i]}));
        const DiagonalEnsembleEvaluator diag(eig, d);
        const CVector c = eig.coefficients(psi0);
        bool at_edge = false;
        const CanonicalResult th =
            thermal_value(eig.eigenvalues(), diag.n_diag(), c.cwiseAbs2().dot(eig.eigenvalues()), at_edge);
        gap[i] = std::abs(diag.evaluate(c).n_bar - th.n_th);
        edge[i] = at_edge;
    });
    const auto best = static_cast<std::size_t>(std::max_element(gap.begin(), gap.end()) - gap.begin());
    const auto clamped = std::count(edge.begin(), edge.end(), 1);
    out.check(std::abs(mus[best] - 0.5) <= 0.25 && !edge[best],
              fmt("N=16 critical |delta_n| max %.4f at mu_f=%.1f (%td points clamped at the spectral edge)", gap[best],
                  mus[best], clamped));
    return out;
}

Outcome ramping() {
    Outcome out;
    const auto t0 = std::chrono::steady_clock::now();
    RampOptions opt;
    opt.sector = true;
    std::vector<double> targets;
    for (int m = -6; m <= 6; ++m) targets.push_back(m);
    const std::vector<double> near{-1.5, kMuCritical, -1.0};
    std::vector<double> all = targets;
    all.insert(all.end(), near.begin(), near.end());

    std::vector<std::vector<RampPoint>> curves;
    for (int n : {8, 10, 12}) curves.push_back(ramp_time_curve(n, 40.0, 30.0, -0.1, all, opt));

    std::string low;
    bool overlap_ok = true;
    double worst_var = 0.0;
    for (std::size_t i = 0; i < targets.size(); ++i) {
        if (std::abs(targets[i] - kMuCritical) <= 1.0) continue;
        const RampPoint& p = curves[2][i];
        if (!p.ok || p.overlap <= 0.99) {
            overlap_ok = false;
            low += fmt(" %g:%.4f", p.mu, p.overlap);
        }
        double lo = std::numeric_limits<double>::infinity(), hi = 0.0, sum = 0.0;
        for (const auto& c : curves) {
            lo = std::min(lo, c[i].t_ramp);
            hi = std::max(hi, c[i].t_ramp);
            sum += c[i].t_ramp;
        }
        worst_var = std::max(worst_var, (hi - lo) / (sum / 3.0));
    }
    out.check(overlap_ok, "N=12 gapped overlaps > 0.99" + (low.empty() ? std::string() : ", below:" + low));
    out.check(worst_var < 0.2, fmt("gapped ramp-time variation over N=8,10,12 max %.3f", worst_var));
    double crit_var = 0.0;
    std::string near_rows;
    for (std::size_t j = 0; j < near.size(); ++j) {
        const std::size_t i = targets.size() + j;
        double lo = std::numeric_limits<double>::infinity(), hi = 0.0, sum = 0.0;
        for (const auto& c : curves) {
            lo = std::min(lo, c[i].t_ramp);
            hi = std::max(hi, c[i].t_ramp);
            sum += c[i].t_ramp;
        }
        const double var = (hi - lo) / (sum / 3.0);
        crit_var = std::max(crit_var, var);
        near_rows += fmt(" %g:%.3f", near[j], var);
    }
    out.check(crit_var > 0.2, "near-critical variation" + near_rows);
    const double secs = elapsed(t0);
    out.check(secs < 900.0, fmt("%.0f s", secs));
    return out;
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

Outcome phase_sweep() {
    Outcome out;
    const auto t0 = std::chrono::steady_clock::now();
    SweepConfig cfg;
    cfg.n_sites = 14;
    cfg.mu_i = {-6.0, 6.0, 0.5};
    cfg.mu_f = {-6.0, 6.0, 0.5};
    cfg.threads = 1;
    const SweepResult one = run_sweep(cfg);
    cfg.threads = 2;
    const SweepResult two = run_sweep(cfg);
    const double secs = elapsed(t0);

    const std::string p1 = "acceptance_sweep_1.csv", p2 = "acceptance_sweep_2.csv";
    write_csv(one, p1);
    write_csv(two, p2);
    auto slurp = [](const std::string& p) {
        std::FILE* f = std::fopen(p.c_str(), "rb");
        std::string s;
        if (!f) return s;
        char buf[4096];
        for (std::size_t k; (k = std::fread(buf, 1, sizeof buf, f)) > 0;) s.append(buf, k);
        std::fclose(f);
        return s;
    };
    const bool same = slurp(p1) == slurp(p2) && !slurp(p1).empty();
    std::remove(p1.c_str());
    std::remove(p2.c_str());

    int failed = 0;
    double diag = 0.0;
    std::vector<double> off;
    for (const SweepCell& c : one.cells) {
        if (c.status != CellStatus::Ok || !c.delta_f) {
            ++failed;
            continue;
        }
        if (c.mu_i == c.mu_f) diag = std::max(diag, *c.delta_f);
        else if (std::abs(c.mu_i - c.mu_f) >= 1.0) off.push_back(*c.delta_f);
    }
    const double ref = median(off);
    out.check(failed == 0, fmt("%zu cells, %d not ok", one.cells.size(), failed));
    out.check(diag < 1e-6, fmt("diagonal delta_F max %.1e", diag));

    auto cell = [&](double mu_i, double mu_f) {
        SweepConfig c = cfg;
        c.mu_i = {mu_i, mu_i, 1.0};
        c.mu_f = {mu_f, mu_f, 1.0};
        c.layers = {true, false, false, false};
        return run_sweep(c).cells.at(0).delta_f.value_or(0.0);
    };
    std::string rows;
    bool regions_ok = true;
    for (auto [mi, mf] : {std::pair{-4.0, 0.0}, {-0.76, 1.6}, {4.0, 2.0}}) {
        const double v = cell(mi, mf);
        regions_ok = regions_ok && v > ref;
        rows += fmt(" (%g,%g):%.3f", mi, mf, v);
    }
    out.check(regions_ok, fmt("region cells above off-diagonal median %.3f:", ref) + rows);

    SweepConfig col = cfg;
    col.mu_f = {kMuCritical, kMuCritical, 1.0};
    col.layers = {true, false, false, false};
    std::vector<double> column;
    for (const SweepCell& c : run_sweep(col).cells)
        if (c.delta_f && std::abs(c.mu_i - kMuCritical) >= 1.0) column.push_back(*c.delta_f);
    const double col_med = median(column);
    out.check(col_med < ref, fmt("mu_f=mu_c column median %.3f", col_med));
    out.check(same, "CSV identical for 1 and 2 threads");
    out.check(secs < 1800.0, fmt("%.0f s for both runs", secs));
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"basis oracle", basis_oracle},
        {"spectral reflection", spectral_reflection},
        {"tdvp identities", tdvp_identities},
        {"manifold anchors", manifold_anchors},
        {"region (2) mapping", region_two_mapping},
        {"critical quench", critical_quench},
        {"magnon analysis", magnon_analysis},
        {"ensembles", ensembles},
        {"ramping", ramping},
        {"phase sweep", phase_sweep},
    };
    std::set<int> only;
    for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const int id = static_cast<int>(i) + 1;
        if (!only.empty() && !only.count(id)) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        failures += o.pass ? 0 : 1;
        std::printf("criterion %d %s %s (%s) [%.1f s]\n", id, o.pass ? "PASS" : "FAIL", criteria[i].first,
                    o.detail.c_str(), elapsed(t0));
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
