#include "disclin/flow.hpp"

#include <cmath>

#include "disclin/ode.hpp"
#include "trace_builder.hpp"

namespace disclin {

namespace {

constexpr double kStationaryForce = 1e-12;

std::vector<double> pack(const Configuration& cfg) {
    std::vector<double> y(2 * cfg.size());
    for (std::size_t k = 0; k < cfg.size(); ++k) {
        y[2 * k] = cfg[k].pos.x;
        y[2 * k + 1] = cfg[k].pos.y;
    }
    return y;
}

}  // namespace

const char* to_string(EventKind k) {
    switch (k) {
        case EventKind::collision_begin: return "collision_begin";
        case EventKind::collision_end: return "collision_end";
        case EventKind::boundary_approach: return "boundary_approach";
        case EventKind::cross_slip: return "cross_slip";
        case EventKind::sliding_begin: return "sliding_begin";
        case EventKind::sliding_end: return "sliding_end";
        case EventKind::stationary: return "stationary";
        case EventKind::step_collapse: return "step_collapse";
    }
    return "unknown";
}

void validate_settings(const IntegratorSettings& st) {
    const auto positive = [](double v, const char* name) {
        if (!(v > 0.0)) throw ValidationError(std::string(name) + " must be strictly positive");
    };
    positive(st.rel_tol, "rel_tol");
    positive(st.abs_tol, "abs_tol");
    positive(st.max_step, "max_step");
    positive(st.t_end, "t_end");
    positive(st.sample_interval, "sample_interval");
    positive(st.collision_distance, "collision_distance");
    positive(st.boundary_margin, "boundary_margin");
    if (st.rel_tol > 1e-3 || st.abs_tol > 1e-3) {
        throw ValidationError("rel_tol and abs_tol must not exceed 1e-3");
    }
    if (!(st.collision_distance < 2.0)) {
        throw ValidationError("collision_distance must be below the disk diameter");
    }
    if (!(st.boundary_margin < 1.0)) {
        throw ValidationError("boundary_margin must be below the disk radius");
    }
}

Trace simulate(const Configuration& cfg0, const IntegratorSettings& st) {
    validate_settings(st);
    validate_configuration(cfg0);

    detail::TraceBuilder tb(cfg0, st);
    Configuration work = cfg0;
    const auto rhs = [&](double, const std::vector<double>& y, std::vector<double>& dydt) {
        for (std::size_t k = 0; k < work.size(); ++k) {
            work[k].pos = {y[2 * k], y[2 * k + 1]};
        }
        const std::vector<Vec2> f = total_forces(work);
        dydt.resize(y.size());
        for (std::size_t k = 0; k < f.size(); ++k) {
            dydt[2 * k] = f[k].x;
            dydt[2 * k + 1] = f[k].y;
        }
    };

    std::vector<double> y = pack(cfg0);

    // Near superposition the approach is doubly exponential and the gap falls
    // far below abs_tol, so plain error control happily accepts steps whose
    // stages straddle the singular set: the pair then hops, reflects, or
    // hovers there instead of collapsing. Three admissibility checks keep a
    // close pair resolved: the gap may not flip orientation within one step;
    // deep inside the plunge the step must satisfy a CFL-like bound (the gap
    // may move by at most half its size per step, with gap velocities taken
    // from the step's own end derivatives); and a deep gap never grows beyond
    // rounding. Rejection shrinks the step until the plunge is resolved; at
    // the separation guard the right side throws and the step size collapses,
    // which is the intended terminal outcome.
    constexpr double kDeepPair = 1e-6;
    const std::size_t n = cfg0.size();
    const auto guard = [&](const ode::Step& cand) {
        const double h = cand.t1 - cand.t0;
        for (std::size_t a = 0; a + 1 < n; ++a) {
            for (std::size_t b = a + 1; b < n; ++b) {
                const Vec2 g0{cand.y0[2 * a] - cand.y0[2 * b],
                              cand.y0[2 * a + 1] - cand.y0[2 * b + 1]};
                const double d0 = norm(g0);
                if (d0 > st.collision_distance) continue;
                const Vec2 g1{cand.y1[2 * a] - cand.y1[2 * b],
                              cand.y1[2 * a + 1] - cand.y1[2 * b + 1]};
                if (dot(g0, g1) <= 0.0) return false;
                const double d1 = norm(g1);
                if (std::min(d0, d1) > kDeepPair) continue;
                const Vec2 v0{cand.f0[2 * a] - cand.f0[2 * b],
                              cand.f0[2 * a + 1] - cand.f0[2 * b + 1]};
                const Vec2 v1{cand.f1[2 * a] - cand.f1[2 * b],
                              cand.f1[2 * a + 1] - cand.f1[2 * b + 1]};
                const double vmax = std::max(norm(v0), norm(v1));
                if (h * vmax > 0.5 * std::max(d0, d1)) return false;
                if (d1 > 1.02 * d0) return false;
            }
        }
        return true;
    };

    bool stationary = false;
    double t_stop = 0.0;
    const auto observer = [&](const ode::Step& step, std::vector<double>&) {
        tb.advance(step, step.t1);
        double fmax = 0.0;
        for (double v : step.f1) fmax = std::max(fmax, std::abs(v));
        if (fmax < kStationaryForce) {
            stationary = true;
            t_stop = step.t1;
            return ode::ObserverAction::halt;
        }
        return ode::ObserverAction::proceed;
    };

    // A state that starts stationary never produces an accepted step worth
    // tracing; detect it up front.
    {
        double fmax = 0.0;
        for (const Vec2& f : total_forces(cfg0)) fmax = std::max(fmax, norm(f));
        if (fmax < kStationaryForce) {
            tb.finish_stationary(0.0, y);
            return tb.take();
        }
    }

    const ode::Settings os{st.rel_tol, st.abs_tol, st.max_step, 0.0, st.t_end};
    const ode::Result res = ode::integrate(rhs, y, os, observer, guard);
    if (stationary) {
        tb.finish_stationary(t_stop, y);
    } else if (res.outcome == ode::Outcome::step_collapse) {
        tb.finish_step_collapse(res.t_final, y);
    } else {
        tb.finish_reached_end(y);
    }
    return tb.take();
}

Vec2 analytic_single(double s, double rho0, double phi0, double T) {
    if (s == 0.0) {
        throw ValidationError("analytic_single requires a nonzero Frank angle");
    }
    if (!(rho0 > 0.0 && rho0 < 1.0)) {
        throw ValidationError("analytic_single requires 0 < rho0 < 1");
    }
    const double mu0 = (1.0 - rho0 * rho0) / (rho0 * rho0);
    const double rho = 1.0 / std::sqrt(1.0 + mu0 * std::exp(-4.0 * s * s * T));
    return {rho * std::cos(phi0), rho * std::sin(phi0)};
}

double energy_dissipation_rate(const Configuration& cfg) {
    double acc = 0.0;
    for (const Vec2& f : total_forces(cfg)) acc += norm_sq(f);
    return -acc;
}

}  // namespace disclin
