#include "disclin/pairlab.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "disclin/errors.hpp"
#include "disclin/ode.hpp"

namespace disclin {

namespace {

// Scalar forcing of the separation equation; callers validate the arguments.
double g_formula(double delta, double s) {
    const double q = 4.0 + delta * delta;
    return 4.0 * s * s * delta * ((4.0 - delta * delta) / q + 2.0 * std::log(4.0 * delta / q));
}

// s-independent bracket function: g_formula with the positive prefactor
// 4 s^2 delta stripped, so the zero can be located once for every charge.
double g_shape(double delta) {
    const double q = 4.0 + delta * delta;
    return (4.0 - delta * delta) / q + 2.0 * std::log(4.0 * delta / q);
}

void require_charge(double s) {
    if (s == 0.0) throw ValidationError("Frank angle must be nonzero");
}

}  // namespace

double dipole_rhs(const DipoleState& st) {
    require_charge(st.s);
    if (!(st.delta > 0.0 && st.delta < 2.0)) {
        throw ValidationError("dipole separation must lie in (0, 2)");
    }
    return g_formula(st.delta, st.s);
}

double find_dipole_equilibrium(double s) {
    require_charge(s);
    // Coarse bracket scan on a fixed grid, then bisection. g_shape is negative
    // near 0 (log-dominated) and positive near 2, with a single sign change.
    double lo = 0.05;
    double flo = g_shape(lo);
    double hi = 0.0;
    for (int i = 2; i <= 39; ++i) {
        const double d = 0.05 * i;
        const double fd = g_shape(d);
        if (flo < 0.0 && fd >= 0.0) {
            hi = d;
            break;
        }
        lo = d;
        flo = fd;
    }
    if (hi == 0.0) throw IntegrationError("dipole equilibrium bracket scan failed");
    while (hi - lo > 1e-12) {
        const double mid = 0.5 * (lo + hi);
        if (g_shape(mid) < 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

ScalarTrace simulate_dipole(double delta0, double s, double t_end) {
    IntegratorSettings st;
    return simulate_dipole(delta0, s, t_end, st);
}

ScalarTrace simulate_dipole(double delta0, double s, double t_end, const IntegratorSettings& st) {
    IntegratorSettings local = st;
    local.t_end = t_end;
    validate_settings(local);
    require_charge(s);
    if (!(delta0 > 0.0 && delta0 < 2.0)) {
        throw ValidationError("dipole separation must lie in (0, 2)");
    }

    ScalarTrace tr;
    std::vector<double> y{delta0};
    const ode::Settings os{local.rel_tol, local.abs_tol, local.max_step, 0.0, t_end};
    const ode::Rhs rhs = [s](double, const std::vector<double>& yy, std::vector<double>& d) {
        if (yy[0] < kMinSeparation) {
            throw CoincidentPositionsError("dipole separation fell below the guard");
        }
        d[0] = g_formula(yy[0], s);
    };

    tr.samples.push_back({0.0, delta0});
    if (std::abs(g_formula(delta0, s)) < 1e-12) {
        // Started at (numerical) equilibrium: constant trace.
        tr.events.push_back({EventKind::stationary, 0.0, -1, -1});
        for (long i = 1;; ++i) {
            const double ts = static_cast<double>(i) * local.sample_interval;
            if (ts > t_end + 1e-15) break;
            tr.samples.push_back({std::min(ts, t_end), delta0});
        }
        if (t_end - tr.samples.back().time > 1e-9) tr.samples.push_back({t_end, delta0});
        return tr;
    }

    long next = 1;
    std::vector<double> tmp(1);
    bool stationary = false;
    double t_stat = 0.0;
    const ode::Observer obs = [&](const ode::Step& step, std::vector<double>&) {
        while (true) {
            const double ts = static_cast<double>(next) * local.sample_interval;
            if (ts > step.t1 + 1e-15 || ts > t_end + 1e-15) break;
            step.eval(ts, tmp);
            tr.samples.push_back({std::min(ts, t_end), tmp[0]});
            ++next;
        }
        if (std::abs(step.f1[0]) < 1e-12) {
            stationary = true;
            t_stat = step.t1;
            return ode::ObserverAction::halt;
        }
        return ode::ObserverAction::proceed;
    };

    const ode::Result res = ode::integrate(rhs, y, os, obs);
    if (stationary) {
        tr.events.push_back({EventKind::stationary, t_stat, -1, -1});
        for (long i = next;; ++i) {
            const double ts = static_cast<double>(i) * local.sample_interval;
            if (ts > t_end + 1e-15) break;
            tr.samples.push_back({std::min(ts, t_end), y[0]});
        }
        if (t_end - tr.samples.back().time > 1e-9) tr.samples.push_back({t_end, y[0]});
    } else if (res.outcome == ode::Outcome::step_collapse) {
        tr.events.push_back({EventKind::step_collapse, res.t_final, -1, -1});
        if (res.t_final - tr.samples.back().time > 1e-9) tr.samples.push_back({res.t_final, y[0]});
    } else {
        if (t_end - tr.samples.back().time > 1e-9) tr.samples.push_back({t_end, y[0]});
    }
    return tr;
}

double dipole_asymptotic(double delta0, double s, double T, AsymptoticBranch branch) {
    require_charge(s);
    const double a = 4.0 * s * s;
    if (branch == AsymptoticBranch::near_zero) {
        if (!(delta0 > 0.0 && delta0 <= 0.05)) {
            throw BranchDomainError("near-zero branch requires 0 < delta0 <= 0.05");
        }
        return std::exp(std::log(delta0) * std::exp(2.0 * a * T));
    }
    if (!(delta0 >= 1.95 && delta0 < 2.0)) {
        throw BranchDomainError("near-two branch requires 1.95 <= delta0 < 2");
    }
    return 2.0 - (2.0 - delta0) * std::exp(-a * T);
}

PairRhs effective_pair_rhs(const EffectivePair& ep) {
    require_charge(ep.s1);
    require_charge(ep.s2);
    if (!(norm_sq(ep.pos) < 1.0)) {
        throw ValidationError("superposed pair must sit strictly inside the unit disk");
    }
    const double w = 1.0 - norm_sq(ep.pos);
    const double se = ep.s_eff();
    return {2.0 * se * se * w * ep.pos, (ep.s2 * ep.s2 - ep.s1 * ep.s1) * w * ep.pos};
}

ConstrainedTrace simulate_constrained_eps(double s1, double s2, const Vec2& xi10, const Vec2& eps,
                                          double t_end) {
    IntegratorSettings st;
    return simulate_constrained_eps(s1, s2, xi10, eps, t_end, st);
}

ConstrainedTrace simulate_constrained_eps(double s1, double s2, const Vec2& xi10, const Vec2& eps,
                                          double t_end, const IntegratorSettings& st) {
    IntegratorSettings local = st;
    local.t_end = t_end;
    validate_settings(local);
    if (norm(eps) < kMinSeparation) {
        throw ValidationError("pair offset must exceed the separation guard");
    }
    const Configuration cfg0{{s1, xi10}, {s2, xi10 - eps}};
    validate_configuration(cfg0);

    // Velocity of the leader and the constraint reaction at a leader position.
    const auto dynamics = [&](const Vec2& p) -> PairRhs {
        const Configuration cfg{{s1, p}, {s2, p - eps}};
        const std::vector<Vec2> f = total_forces(cfg);
        return {0.5 * (f[0] + f[1]), 0.5 * (f[1] - f[0])};
    };

    ConstrainedTrace tr;
    const double rim = 1.0 - local.boundary_margin;
    const auto record = [&](double t, const Vec2& p) {
        tr.samples.push_back({t, p, p - eps, dynamics(p).multiplier});
    };

    record(0.0, xi10);
    bool boundary_armed = norm(xi10) < rim;
    if (!boundary_armed) tr.events.push_back({EventKind::boundary_approach, 0.0, 0, -1});

    if (norm(dynamics(xi10).velocity) < 1e-12) {
        tr.events.push_back({EventKind::stationary, 0.0, -1, -1});
        for (long i = 1;; ++i) {
            const double ts = static_cast<double>(i) * local.sample_interval;
            if (ts > t_end + 1e-15) break;
            record(std::min(ts, t_end), xi10);
        }
        if (t_end - tr.samples.back().time > 1e-9) record(t_end, xi10);
        return tr;
    }

    std::vector<double> y{xi10.x, xi10.y};
    const ode::Settings os{local.rel_tol, local.abs_tol, local.max_step, 0.0, t_end};
    const ode::Rhs rhs = [&](double, const std::vector<double>& yy, std::vector<double>& d) {
        const Vec2 v = dynamics({yy[0], yy[1]}).velocity;
        d[0] = v.x;
        d[1] = v.y;
    };

    long next = 1;
    std::vector<double> tmp(2);
    bool stationary = false;
    double t_stat = 0.0;
    const ode::Observer obs = [&](const ode::Step& step, std::vector<double>&) {
        const auto radius_at = [&](double t) {
            step.eval(t, tmp);
            return std::hypot(tmp[0], tmp[1]);
        };
        if (boundary_armed && radius_at(step.t1) >= rim) {
            const double tx = ode::bisect_time(
                step, [&](double, const std::vector<double>& yy) { return std::hypot(yy[0], yy[1]) - rim; },
                step.t0, step.t1);
            tr.events.push_back({EventKind::boundary_approach, tx, 0, -1});
            boundary_armed = false;
        } else if (!boundary_armed && radius_at(step.t1) < rim) {
            boundary_armed = true;  // re-arm after the pair retreats inward
        }
        while (true) {
            const double ts = static_cast<double>(next) * local.sample_interval;
            if (ts > step.t1 + 1e-15 || ts > t_end + 1e-15) break;
            step.eval(ts, tmp);
            record(std::min(ts, t_end), {tmp[0], tmp[1]});
            ++next;
        }
        if (std::hypot(step.f1[0], step.f1[1]) < 1e-12) {
            stationary = true;
            t_stat = step.t1;
            return ode::ObserverAction::halt;
        }
        return ode::ObserverAction::proceed;
    };

    const ode::Result res = ode::integrate(rhs, y, os, obs);
    const Vec2 last{y[0], y[1]};
    if (stationary) {
        tr.events.push_back({EventKind::stationary, t_stat, -1, -1});
        for (long i = next;; ++i) {
            const double ts = static_cast<double>(i) * local.sample_interval;
            if (ts > t_end + 1e-15) break;
            record(std::min(ts, t_end), last);
        }
        if (t_end - tr.samples.back().time > 1e-9) record(t_end, last);
    } else if (res.outcome == ode::Outcome::step_collapse) {
        tr.events.push_back({EventKind::step_collapse, res.t_final, -1, -1});
        if (res.t_final - tr.samples.back().time > 1e-9) record(res.t_final, last);
    } else {
        if (t_end - tr.samples.back().time > 1e-9) record(t_end, last);
    }
    std::stable_sort(tr.events.begin(), tr.events.end(),
                     [](const Event& a, const Event& b) { return a.time < b.time; });
    return tr;
}

}  // namespace disclin
