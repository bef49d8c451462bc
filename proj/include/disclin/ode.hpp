#pragma once

#include <functional>
#include <vector>

// Adaptive embedded Runge-Kutta 4(5) (Dormand-Prince pair) with PI step-size
// control. One implementation drives every front end: the N-body gradient
// flow, the scalar dipole equation, the constrained pair, and the glide
// inclusion. Dense output between accepted steps is cubic Hermite.

namespace disclin::ode {

struct Settings {
    double rel_tol = 1e-9;
    double abs_tol = 1e-9;
    double max_step = 0.02;
    double t0 = 0.0;
    double t1 = 1.0;
};

// One accepted step. The references alias integrator storage and are valid
// only for the duration of the observer call.
struct Step {
    double t0 = 0.0;
    double t1 = 0.0;
    const std::vector<double>& y0;
    const std::vector<double>& y1;
    const std::vector<double>& f0;
    const std::vector<double>& f1;

    // Cubic Hermite interpolant on [t0, t1]; t is clamped to the interval.
    void eval(double t, std::vector<double>& out) const;
};

enum class Outcome {
    reached_end,    // integrated to t1
    halted,         // observer requested a stop after an accepted step
    step_collapse,  // step size fell below the floor (singular right side)
};

enum class ObserverAction {
    proceed,         // keep integrating
    state_modified,  // caller edited y in place; derivative cache is stale
    halt,            // stop after this step
};

struct Result {
    Outcome outcome = Outcome::reached_end;
    double t_final = 0.0;
};

using Rhs = std::function<void(double t, const std::vector<double>& y, std::vector<double>& dydt)>;
using Observer = std::function<ObserverAction(const Step& step, std::vector<double>& y)>;

// Optional admissibility check on a candidate step that already passed error
// control; the Step carries the end states and end derivatives. Returning
// false rejects the step, which is retried at a quarter of the size. Fronts
// whose right side is singular on a thin set use this to keep accepted steps
// from jumping across it: repeated rejection collapses the step size, which
// surfaces as Outcome::step_collapse.
using StepGuard = std::function<bool(const Step& candidate)>;

// Integrates y' = rhs(t, y) from (s.t0, y) toward s.t1, advancing y in place.
// The observer runs after every accepted step and may modify y (projection
// steps) or halt. A right side that throws CoincidentPositionsError causes
// step rejection and retry with a smaller step; if the step size collapses,
// integration ends with Outcome::step_collapse at the last accepted time.
Result integrate(const Rhs& rhs, std::vector<double>& y, const Settings& s, const Observer& observer,
                 const StepGuard& guard = nullptr);

// Bisection for the zero of a scalar function of time along one accepted
// step, using the dense interpolant for states. f must change sign between
// lo and hi; returns a time within time_tol at or after the crossing, so the
// interpolated state at the returned time lies on the crossed side.
double bisect_time(const Step& step, const std::function<double(double t, const std::vector<double>& y)>& f,
                   double lo, double hi, double time_tol = 1e-9);

}  // namespace disclin::ode
