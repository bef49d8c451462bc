#pragma once

#include <string>
#include <vector>

#include "disclin/model.hpp"

// Time integration of the unconstrained gradient flow dp_k/dT = F_k with
// event detection, plus the exact single-disclination solution used as a
// regression reference.

namespace disclin {

struct IntegratorSettings {
    double rel_tol = 1e-9;
    double abs_tol = 1e-9;
    double max_step = 0.02;           // nondimensional time
    double t_end = 1.0;
    double sample_interval = 0.01;
    double collision_distance = 0.05;  // eps_c: pair distance declaring a collision
    double boundary_margin = 0.01;     // delta_b: boundary event at |p| > 1 - margin
};

// Throws ValidationError naming the violated invariant (positivity,
// tolerance caps, collision_distance < 2).
void validate_settings(const IntegratorSettings& st);

enum class EventKind {
    collision_begin,   // pair distance crossed eps_c downward (subjects a, b)
    collision_end,     // pair distance crossed eps_c upward (subjects a, b)
    boundary_approach, // |p_a| crossed 1 - delta_b upward
    cross_slip,        // glide: disclination a switched direction discretely
    sliding_begin,     // glide: disclination a entered sliding on a switching surface
    sliding_end,       // glide: disclination a left the switching surface
    stationary,        // terminal: all driving forces below 1e-12
    step_collapse,     // terminal: step size collapsed near a singular configuration
};

const char* to_string(EventKind k);

struct Event {
    EventKind kind;
    double time = 0.0;
    int a = -1;  // first subject index, -1 when not applicable
    int b = -1;  // second subject index, -1 when not applicable
};

struct Sample {
    double time = 0.0;
    Configuration cfg;
    double energy = 0.0;
    std::vector<Vec2> forces;
};

struct Trace {
    std::vector<Sample> samples;  // times strictly increasing
    std::vector<Event> events;
};

// Integrates the gradient flow from cfg0 with an adaptive embedded RK4(5)
// pair, sampling at uniform sample_interval via cubic interpolation and
// locating event times by bisection to 1e-9. Terminal conditions: t_end
// reached, all forces below 1e-12 (stationary event; remaining samples hold
// the constant state), or step-size collapse near the superposition set
// (step_collapse event; the trace ends there).
Trace simulate(const Configuration& cfg0, const IntegratorSettings& st);

// Exact single-disclination solution: purely radial motion at constant polar
// angle phi0 with rho(T) = 1 / sqrt(1 + mu0 exp(-4 s^2 T)),
// mu0 = (1 - rho0^2) / rho0^2. Requires 0 < rho0 < 1.
Vec2 analytic_single(double s, double rho0, double phi0, double T);

// Gradient-flow identity dH/dT = -sum_k |F_k|^2; always <= 0.
double energy_dissipation_rate(const Configuration& cfg);

}  // namespace disclin
