#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "disclin/flow.hpp"
#include "disclin/model.hpp"
#include "disclin/ode.hpp"

// Internal helper shared by the free-flow and glide integrators: uniform
// dense sampling through the step interpolant, collision/boundary event
// detection with bisected event times, and terminal-event bookkeeping.

namespace disclin::detail {

class TraceBuilder {
  public:
    TraceBuilder(const Configuration& cfg0, const IntegratorSettings& st)
        : base_(cfg0), st_(st), col_active_(cfg0.size() * cfg0.size(), 0), bd_active_(cfg0.size(), 0) {
        emit_sample(0.0, cfg0);
        // States already inside a detection region at T = 0 raise their event
        // immediately so that begin/end pairs stay properly bracketed.
        for (std::size_t k = 0; k + 1 < cfg0.size(); ++k) {
            for (std::size_t h = k + 1; h < cfg0.size(); ++h) {
                if (norm(cfg0[k].pos - cfg0[h].pos) <= st.collision_distance) {
                    trace_.events.push_back({EventKind::collision_begin, 0.0, int(k), int(h)});
                    pair_active(k, h) = 1;
                }
            }
        }
        for (std::size_t k = 0; k < cfg0.size(); ++k) {
            if (norm(cfg0[k].pos) > 1.0 - st.boundary_margin) {
                trace_.events.push_back({EventKind::boundary_approach, 0.0, int(k), -1});
                bd_active_[k] = 1;
            }
        }
    }

    Configuration unpack(const std::vector<double>& y) const {
        Configuration cfg = base_;
        for (std::size_t k = 0; k < cfg.size(); ++k) {
            cfg[k].pos = {y[2 * k], y[2 * k + 1]};
        }
        return cfg;
    }

    // Samples and scans for collision/boundary events on (t_prev, t_hi] where
    // t_hi = min(step.t1, t_limit). Glide passes the crossing time as t_limit
    // when it truncates a step at a switching event.
    void advance(const ode::Step& step, double t_limit) {
        const double t_hi = std::min(step.t1, t_limit);
        scan_pair_events(step, t_hi);
        scan_boundary_events(step, t_hi);
        std::vector<double> y;
        while (true) {
            const double ts = static_cast<double>(next_sample_) * st_.sample_interval;
            if (ts > t_hi + 1e-12 * std::max(1.0, t_hi) || ts > st_.t_end) break;
            step.eval(ts, y);
            emit_sample(ts, unpack(y));
            ++next_sample_;
        }
    }

    void add_event(const Event& ev) { trace_.events.push_back(ev); }

    void finish_reached_end(const std::vector<double>& y) { emit_final(st_.t_end, unpack(y)); }

    // All driving forces vanished at time t: the state is exact from here on,
    // so the remaining sample grid is filled with the frozen configuration.
    void finish_stationary(double t, const std::vector<double>& y) {
        trace_.events.push_back({EventKind::stationary, t, -1, -1});
        const Configuration cfg = unpack(y);
        while (true) {
            const double ts = static_cast<double>(next_sample_) * st_.sample_interval;
            if (ts > st_.t_end) break;
            if (ts > t) emit_sample(ts, cfg);
            ++next_sample_;
        }
        emit_final(st_.t_end, cfg);
    }

    void finish_step_collapse(double t, const std::vector<double>& y) {
        trace_.events.push_back({EventKind::step_collapse, t, -1, -1});
        emit_final(t, unpack(y));
    }

    Trace take() {
        std::stable_sort(trace_.events.begin(), trace_.events.end(),
                         [](const Event& a, const Event& b) { return a.time < b.time; });
        return std::move(trace_);
    }

  private:
    char& pair_active(std::size_t k, std::size_t h) { return col_active_[k * base_.size() + h]; }

    void emit_sample(double t, const Configuration& cfg) {
        if (!trace_.samples.empty() && t <= t_last_ + 1e-12) return;
        try {
            Sample s;
            s.time = t;
            s.energy = energy(cfg);
            s.forces = total_forces(cfg);
            s.cfg = cfg;
            trace_.samples.push_back(std::move(s));
            t_last_ = t;
        } catch (const CoincidentPositionsError&) {
            // Sample interpolated into the singular set (imminent collapse): skip.
        }
    }

    void emit_final(double t, const Configuration& cfg) {
        if (t > t_last_ + 1e-9) emit_sample(t, cfg);
    }

    void scan_pair_events(const ode::Step& step, double t_hi) {
        std::vector<double> y;
        for (std::size_t k = 0; k + 1 < base_.size(); ++k) {
            for (std::size_t h = k + 1; h < base_.size(); ++h) {
                const auto sep = [&](double, const std::vector<double>& yy) {
                    const Vec2 d{yy[2 * k] - yy[2 * h], yy[2 * k + 1] - yy[2 * h + 1]};
                    return norm(d) - st_.collision_distance;
                };
                const double g0 = sep(step.t0, step.y0);
                step.eval(t_hi, y);
                const double g1 = sep(t_hi, y);
                const bool inside = pair_active(k, h) != 0;
                if (!inside && g1 <= 0.0 && g0 > 0.0) {
                    const double te = ode::bisect_time(step, sep, step.t0, t_hi);
                    trace_.events.push_back({EventKind::collision_begin, te, int(k), int(h)});
                    pair_active(k, h) = 1;
                } else if (inside && g1 > 0.0 && g0 <= 0.0) {
                    const double te = ode::bisect_time(step, sep, step.t0, t_hi);
                    trace_.events.push_back({EventKind::collision_end, te, int(k), int(h)});
                    pair_active(k, h) = 0;
                }
            }
        }
    }

    void scan_boundary_events(const ode::Step& step, double t_hi) {
        std::vector<double> y;
        const double rim = 1.0 - st_.boundary_margin;
        for (std::size_t k = 0; k < base_.size(); ++k) {
            const auto radial = [&](double, const std::vector<double>& yy) {
                return std::hypot(yy[2 * k], yy[2 * k + 1]) - rim;
            };
            const double g0 = radial(step.t0, step.y0);
            step.eval(t_hi, y);
            const double g1 = radial(t_hi, y);
            if (!bd_active_[k] && g1 > 0.0 && g0 <= 0.0) {
                const double te = ode::bisect_time(step, radial, step.t0, t_hi);
                trace_.events.push_back({EventKind::boundary_approach, te, int(k), -1});
                bd_active_[k] = 1;
            } else if (bd_active_[k] && g1 <= 0.0) {
                bd_active_[k] = 0;  // re-arm; only the upward crossing is an event
            }
        }
    }

    Configuration base_;
    IntegratorSettings st_;
    Trace trace_;
    long next_sample_ = 1;
    std::vector<char> col_active_;
    std::vector<char> bd_active_;
    double t_last_ = -1.0;
};

}  // namespace disclin::detail
