#include "scarsim/ramping.hpp"

#include <cmath>

#include "scarsim/operators.hpp"
#include "scarsim/parallel.hpp"
#include "scarsim/spectroscopy.hpp"

namespace scarsim {

double mu_of_t(const RampSchedule& s, double t) {
    if (t == s.B || t == s.C) fail(ErrorKind::Schedule, "ramp evaluated at a pole, t=" + std::to_string(t));
    const double mu = s.A / ((t - s.B) * (t - s.B)) - s.A / ((t - s.C) * (t - s.C)) + s.mu_c;
    if (!std::isfinite(mu)) fail(ErrorKind::Schedule, "ramp is not finite at t=" + std::to_string(t));
    return mu;
}

RampSchedule schedule_for_target(double A_magnitude, double B, double C, double target_mu, double mu_c) {
    const double a = std::abs(A_magnitude);
    return {target_mu > mu_c ? -a : a, B, C, mu_c};
}

InitialState parse_initial(const std::string& text) {
    if (text == "auto") return InitialState::Auto;
    if (text == "z2") return InitialState::Z2;
    if (text == "zplus") return InitialState::Zplus;
    if (text == "polarized") return InitialState::Polarized;
    fail(ErrorKind::Config, "unknown initial state '" + text + "' (auto, z2, zplus, polarized)");
}

const char* initial_name(InitialState s) {
    switch (s) {
    case InitialState::Auto: return "auto";
    case InitialState::Z2: return "z2";
    case InitialState::Zplus: return "zplus";
    case InitialState::Polarized: return "polarized";
    }
    return "auto";
}

InitialState resolve_initial(const RampSchedule& schedule, const RampOptions& options) {
    InitialState s = options.initial;
    if (s == InitialState::Auto) {
        if (schedule.A < 0.0) return InitialState::Polarized;
        // Under PBC the Neel-side ground state is translation symmetric; a single Neel pattern caps the overlap at 1/2.
        s = options.bc == BoundaryCondition::Periodic ? InitialState::Zplus : InitialState::Z2;
    }
    if (options.sector && s == InitialState::Z2) s = InitialState::Zplus;
    return s;
}

RampResult ramp_prepare(int n_sites, const RampSchedule& schedule, double target_mu, const RampOptions& options) {
    if (options.sector && options.bc != BoundaryCondition::Periodic)
        fail(ErrorKind::UnsupportedSymmetry, "sector ramps require periodic boundaries");
    if (!(options.t_max > 0.0)) fail(ErrorKind::Config, "ramp window must be positive");
    if ((schedule.B > 0.0 && schedule.B <= options.t_max) || (schedule.C > 0.0 && schedule.C <= options.t_max))
        fail(ErrorKind::Schedule, "ramp pole lies inside the integration window");
    auto basis = std::make_shared<const ConstrainedBasis>(enumerate_basis(n_sites, options.bc));
    RampResult out;
    out.initial = resolve_initial(schedule, options);
    CVector psi_full;
    switch (out.initial) {
    case InitialState::Z2: psi_full = z2_state(*basis); break;
    case InitialState::Zplus: psi_full = zplus_state(*basis); break;
    default: psi_full = polarized_state(*basis); break;
    }

    std::unique_ptr<SymmetrySector> sector;
    AffineHamiltonian H;
    CVector psi0;
    if (options.sector) {
        sector = std::make_unique<SymmetrySector>(basis, 0, Parity::Even);
        H = make_affine(*sector);
        psi0 = sector->project(psi_full);
    } else {
        H = make_affine(*basis);
        psi0 = psi_full;
    }
    SparseOperator H_target = options.sector ? build_pxp(*sector, {1.0, target_mu}) : build_pxp(*basis, {1.0, target_mu});
    const CVector target = ground_state(H_target).state;

    auto overlap = [&](const CVector& psi) { return std::norm(target.dot(psi)); };
    out.overlap = overlap(psi0);
    out.t_ramp = 0.0;
    out.state = psi0;
    out.trace.push_back({0.0, mu_of_t(schedule, 0.0), out.overlap});
    double next_trace = options.dt_trace;
    auto observer = [&](double t, const CVector& psi) {
        const double ov = overlap(psi);
        if (ov > out.overlap) {
            out.overlap = ov;
            out.t_ramp = t;
            out.state = psi;
        }
        if (t >= next_trace - 1e-9) {
            out.trace.push_back({t, mu_of_t(schedule, t), ov});
            next_trace += options.dt_trace;
        }
    };
    TimeGrid grid{0.0, options.t_max, options.dt};
    evolve_time_dependent([&](double t) { return mu_of_t(schedule, t); }, H, psi0, grid, kKrylovTol, observer);
    if (sector) out.state = sector->expand(out.state);
    if (out.overlap <= 0.5)
        fail(ErrorKind::PreparationFailed, "best overlap " + std::to_string(out.overlap) + " at t=" +
                                               std::to_string(out.t_ramp) + " does not exceed 0.5");
    return out;
}

std::vector<RampPoint> ramp_time_curve(int n_sites, double A_magnitude, double B, double C,
                                       const std::vector<double>& mu_grid, const RampOptions& options) {
    std::vector<RampPoint> out(mu_grid.size());
    parallel_for(mu_grid.size(), resolve_threads(0), [&](std::size_t i) {
        const double mu = mu_grid[i];
        try {
            RampSchedule s = schedule_for_target(A_magnitude, B, C, mu);
            RampResult r = ramp_prepare(n_sites, s, mu, options);
            out[i] = {mu, r.t_ramp, r.overlap, true, ""};
        } catch (const Error& e) {
            out[i] = {mu, 0.0, 0.0, false, e.what()};
        }
    });
    return out;
}

}  // namespace scarsim
