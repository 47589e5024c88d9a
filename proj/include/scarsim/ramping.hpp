#pragma once

#include <string>
#include <vector>

#include "scarsim/propagation.hpp"

namespace scarsim {

constexpr double kMuCritical = -1.31;

struct RampSchedule {
    double A = -40.0;
    double B = 30.0;
    double C = -0.1;
    double mu_c = kMuCritical;
};

double mu_of_t(const RampSchedule& schedule, double t);

// Sign of A follows the branch: negative when ramping down from the polarized state, positive from the Neel side.
RampSchedule schedule_for_target(double A_magnitude, double B, double C, double target_mu, double mu_c = kMuCritical);

enum class InitialState { Auto, Z2, Zplus, Polarized };

InitialState parse_initial(const std::string& text);
const char* initial_name(InitialState s);

struct RampOptions {
    BoundaryCondition bc = BoundaryCondition::Periodic;
    // Evolve inside the k = 0, p = +1 sector.
    bool sector = false;
    InitialState initial = InitialState::Auto;
    double t_max = 25.0;
    double dt = kRampDt;
    // Overlap is checked after every step; the trace keeps one sample per dt_trace.
    double dt_trace = 0.1;
};

struct RampSample {
    double t;
    double mu;
    double overlap;
};

struct RampResult {
    CVector state;
    double t_ramp = 0.0;
    double overlap = 0.0;
    InitialState initial = InitialState::Auto;
    std::vector<RampSample> trace;
};

// Initial state actually used: Auto starts from the ground state at the schedule's t = 0 end
// (polarized for A < 0, Neel side for A > 0).
InitialState resolve_initial(const RampSchedule& schedule, const RampOptions& options);

RampResult ramp_prepare(int n_sites, const RampSchedule& schedule, double target_mu, const RampOptions& options = {});

struct RampPoint {
    double mu;
    double t_ramp;
    double overlap;
    bool ok;
    std::string message;
};

std::vector<RampPoint> ramp_time_curve(int n_sites, double A_magnitude, double B, double C,
                                       const std::vector<double>& mu_grid, const RampOptions& options = {});

}  // namespace scarsim
