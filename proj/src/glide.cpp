#include "disclin/glide.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>

#include "disclin/ode.hpp"
#include "trace_builder.hpp"

namespace disclin {

namespace {

constexpr double kTieTol = 1e-9;          // relative tie tolerance for direction selection
constexpr double kNormalFdStep = 1e-7;    // finite-difference step for the surface normal
constexpr double kStationaryVel = 1e-12;  // terminal glide condition on projected speeds
constexpr double kForceWake = 1e-13;      // force level that assigns a direction to an idle disclination

// Per-disclination motion mode between events.
struct Mode {
    enum Kind { idle, normal, sliding } kind = idle;
    int dir = -1;  // normal: index of the assigned direction
    int gm = -1;   // sliding: index of g- (the side being left)
    int gp = -1;   // sliding: index of g+ (the side being entered)
};

Configuration unpack(const Configuration& base, const std::vector<double>& y) {
    Configuration cfg = base;
    for (std::size_t k = 0; k < cfg.size(); ++k) cfg[k].pos = {y[2 * k], y[2 * k + 1]};
    return cfg;
}

Vec2 force_of(const Configuration& base, const std::vector<double>& y, std::size_t k) {
    return total_force(unpack(base, y), k);
}

// Switching event function e(x) = F_k(x) . g0, with only the k-th position
// replaced by x.
double switch_value(Configuration cfg, std::size_t k, const Vec2& x, const Vec2& g0) {
    cfg[k].pos = x;
    return dot(total_force(cfg, k), g0);
}

// Gradient of the event function with respect to the k-th position (central
// differences); points from the g- side toward the g+ side.
Vec2 switch_gradient(const Configuration& cfg, std::size_t k, const Vec2& g0) {
    const double h = kNormalFdStep;
    const Vec2 p = cfg[k].pos;
    const double ex = switch_value(cfg, k, {p.x + h, p.y}, g0) - switch_value(cfg, k, {p.x - h, p.y}, g0);
    const double ey = switch_value(cfg, k, {p.x, p.y + h}, g0) - switch_value(cfg, k, {p.x, p.y - h}, g0);
    return {ex / (2.0 * h), ey / (2.0 * h)};
}

Vec2 surface_normal(const Configuration& cfg, std::size_t k, const Vec2& g0) {
    const Vec2 grad = switch_gradient(cfg, k, g0);
    const double n = norm(grad);
    if (n < 1e-14) return normalized(g0);  // degenerate surface; fall back to the chord
    return grad / n;
}

int argmax_direction(const Vec2& f, const GlideSet& gs) {
    int best = 0;
    double bv = dot(f, gs.directions[0]);
    for (std::size_t i = 1; i < gs.directions.size(); ++i) {
        const double v = dot(f, gs.directions[i]);
        if (v > bv) {
            bv = v;
            best = static_cast<int>(i);
        }
    }
    return best;
}

int runner_up_direction(const Vec2& f, const GlideSet& gs, int best) {
    int second = best == 0 ? 1 : 0;
    double sv = dot(f, gs.directions[second]);
    for (std::size_t i = 0; i < gs.directions.size(); ++i) {
        if (static_cast<int>(i) == best) continue;
        const double v = dot(f, gs.directions[i]);
        if (v > sv) {
            sv = v;
            second = static_cast<int>(i);
        }
    }
    return second;
}

}  // namespace

GlideSet axes_glide_set() {
    return GlideSet{{{1.0, 0.0}, {-1.0, 0.0}, {0.0, 1.0}, {0.0, -1.0}}};
}

GlideSet hexagonal_glide_set() {
    GlideSet gs;
    for (int j = 0; j < 3; ++j) {
        const double a = j * std::numbers::pi / 3.0;
        gs.directions.push_back({std::cos(a), std::sin(a)});
    }
    for (int j = 0; j < 3; ++j) gs.directions.push_back(-gs.directions[j]);
    return gs;
}

void validate_glide_set(const GlideSet& gs) {
    const auto& d = gs.directions;
    if (d.size() < 4 || d.size() % 2 != 0) {
        throw InvalidGlideSetError("glide set must contain an even number of directions, at least 4");
    }
    for (const Vec2& g : d) {
        if (std::abs(norm(g) - 1.0) > 1e-12) {
            throw InvalidGlideSetError("glide directions must be unit vectors");
        }
    }
    for (std::size_t i = 0; i < d.size(); ++i) {
        for (std::size_t j = i + 1; j < d.size(); ++j) {
            if (norm(d[i] - d[j]) < 1e-9) {
                throw InvalidGlideSetError("glide directions must be pairwise distinct");
            }
        }
    }
    for (const Vec2& g : d) {
        bool has_neg = false;
        for (const Vec2& o : d) {
            if (norm(g + o) < 1e-12) {
                has_neg = true;
                break;
            }
        }
        if (!has_neg) throw InvalidGlideSetError("glide set must be closed under negation");
    }
    bool spans = false;
    for (std::size_t i = 0; i < d.size() && !spans; ++i) {
        for (std::size_t j = i + 1; j < d.size(); ++j) {
            if (std::abs(cross(d[i], d[j])) > 1e-9) {
                spans = true;
                break;
            }
        }
    }
    if (!spans) throw InvalidGlideSetError("glide set must span the plane");
}

DirectionSelection select_directions(const Vec2& force, const GlideSet& gs, double tie_tol) {
    validate_glide_set(gs);
    if (tie_tol < 0.0) throw InvalidGlideSetError("tie_tol must be nonnegative");
    DirectionSelection sel;
    const double fn = norm(force);
    if (fn == 0.0) {
        sel.status = SelectionStatus::zero_force;
        return sel;
    }
    const int best = argmax_direction(force, gs);
    const int second = runner_up_direction(force, gs, best);
    const double gap = dot(force, gs.directions[best]) - dot(force, gs.directions[second]);
    if (gap <= tie_tol * fn) {
        sel.status = SelectionStatus::tie;
        const int lo = std::min(best, second), hi = std::max(best, second);
        sel.directions = {gs.directions[lo], gs.directions[hi]};
    } else {
        sel.status = SelectionStatus::unique;
        sel.directions = {gs.directions[best]};
    }
    for (const Vec2& g : sel.directions) sel.projected_forces.push_back(dot(force, g) * g);
    return sel;
}

ForceHull convexified_force(const DirectionSelection& sel) {
    switch (sel.status) {
        case SelectionStatus::zero_force: return {HullKind::zero, {}, {}};
        case SelectionStatus::unique: return {HullKind::point, sel.projected_forces[0], {}};
        case SelectionStatus::tie: return {HullKind::segment, sel.projected_forces[0], sel.projected_forces[1]};
    }
    return {HullKind::zero, {}, {}};
}

double sliding_coefficient(const Vec2& f_minus, const Vec2& f_plus, const Vec2& normal) {
    const double sm = dot(f_minus, normal);
    const double sp = dot(f_plus, normal);
    if (!(sm > 0.0) || !(sp < 0.0)) {
        throw PreconditionError("sliding requires F-.N > 0 and F+.N < 0 (otherwise: cross-slip)");
    }
    return sm / (sm - sp);
}

namespace {

struct PendingSwitch {
    double time = 0.0;
    std::size_t k = 0;
    EventKind kind = EventKind::cross_slip;
    Mode new_mode;
    bool silent = false;  // direction assignment for a previously idle disclination
};

class GlideDriver {
  public:
    GlideDriver(const Configuration& cfg0, const GlideSet& gs, const IntegratorSettings& st)
        : base_(cfg0), gs_(gs), st_(st), tb_(cfg0, st), modes_(cfg0.size()) {}

    Trace run() {
        std::vector<double> y(2 * base_.size());
        for (std::size_t k = 0; k < base_.size(); ++k) {
            y[2 * k] = base_[k].pos.x;
            y[2 * k + 1] = base_[k].pos.y;
        }
        init_modes(y);

        if (max_speed(0.0, y) < kStationaryVel) {
            tb_.finish_stationary(0.0, y);
            return tb_.take();
        }

        double t = 0.0;
        while (true) {
            pending_.reset();
            stationary_ = false;
            const ode::Settings os{st_.rel_tol, st_.abs_tol, st_.max_step, t, st_.t_end};
            const auto rhs = [this](double tt, const std::vector<double>& yy, std::vector<double>& dydt) {
                eval_rhs(tt, yy, dydt);
            };
            const auto obs = [this](const ode::Step& step, std::vector<double>& yy) {
                return observe(step, yy);
            };
            const ode::Result res = ode::integrate(rhs, y, os, obs);

            if (pending_) {
                const PendingSwitch ps = *pending_;
                if (!ps.silent) {
                    tb_.add_event({ps.kind, ps.time, static_cast<int>(ps.k), -1});
                }
                modes_[ps.k] = ps.new_mode;
                y = pending_state_;
                t = ps.time;
                if (t >= st_.t_end - 1e-12) {
                    tb_.finish_reached_end(y);
                    break;
                }
                continue;
            }
            if (stationary_) {
                tb_.finish_stationary(res.t_final, y);
            } else if (res.outcome == ode::Outcome::step_collapse) {
                tb_.finish_step_collapse(res.t_final, y);
            } else {
                tb_.finish_reached_end(y);
            }
            break;
        }
        return tb_.take();
    }

  private:
    void init_modes(const std::vector<double>& y) {
        const Configuration cfg = unpack(base_, y);
        for (std::size_t k = 0; k < cfg.size(); ++k) {
            const Vec2 f = total_force(cfg, k);
            if (norm(f) == 0.0) {
                modes_[k] = Mode{Mode::idle, -1, -1, -1};
                continue;
            }
            const int best = argmax_direction(f, gs_);
            const int second = runner_up_direction(f, gs_, best);
            const double gap = dot(f, gs_.directions[best]) - dot(f, gs_.directions[second]);
            if (gap > kTieTol * norm(f)) {
                modes_[k] = Mode{Mode::normal, best, -1, -1};
                continue;
            }
            // Tied start: classify like a surface crossing without history.
            // Opposite one-sided pushes (in either orientation) admit the
            // sliding solution, which is the one that preserves a symmetry
            // of the force field; equal pushes pick the side being entered.
            const int ia = std::min(best, second), ib = std::max(best, second);
            const Vec2 g0 = gs_.directions[ib] - gs_.directions[ia];
            const Vec2 n = surface_normal(cfg, k, g0);
            const double sa = dot(dot(f, gs_.directions[ia]) * gs_.directions[ia], n);
            const double sb = dot(dot(f, gs_.directions[ib]) * gs_.directions[ib], n);
            if (sa * sb < 0.0) {
                modes_[k] = Mode{Mode::sliding, -1, ia, ib};
                tb_.add_event({EventKind::sliding_begin, 0.0, static_cast<int>(k), -1});
            } else if (sb > 0.0) {
                modes_[k] = Mode{Mode::normal, ib, -1, -1};
            } else {
                modes_[k] = Mode{Mode::normal, ia, -1, -1};
            }
        }
    }

    Vec2 velocity_of(const Configuration& cfg, std::size_t k) const {
        const Mode& m = modes_[k];
        if (m.kind == Mode::idle) return {0.0, 0.0};
        const Vec2 f = total_force(cfg, k);
        if (m.kind == Mode::normal) {
            const Vec2& g = gs_.directions[m.dir];
            return dot(f, g) * g;
        }
        const Vec2& gm = gs_.directions[m.gm];
        const Vec2& gp = gs_.directions[m.gp];
        const Vec2 fm = dot(f, gm) * gm;
        const Vec2 fp = dot(f, gp) * gp;
        const Vec2 n = surface_normal(cfg, k, gp - gm);
        const double sm = dot(fm, n);
        const double sp = dot(fp, n);
        const double den = sm - sp;
        const double alpha = den != 0.0 ? std::clamp(sm / den, 0.0, 1.0) : 0.5;
        return (1.0 - alpha) * fm + alpha * fp;
    }

    void eval_rhs(double, const std::vector<double>& y, std::vector<double>& dydt) const {
        const Configuration cfg = unpack(base_, y);
        dydt.resize(y.size());
        for (std::size_t k = 0; k < cfg.size(); ++k) {
            const Vec2 v = velocity_of(cfg, k);
            dydt[2 * k] = v.x;
            dydt[2 * k + 1] = v.y;
        }
    }

    double max_speed(double t, const std::vector<double>& y) const {
        std::vector<double> dydt;
        eval_rhs(t, y, dydt);
        double m = 0.0;
        for (double v : dydt) m = std::max(m, std::abs(v));
        return m;
    }

    // Detects the earliest switching event inside the accepted step, if any.
    std::optional<PendingSwitch> detect(const ode::Step& step) {
        std::optional<PendingSwitch> earliest;
        const Configuration cfg1 = unpack(base_, step.y1);
        for (std::size_t k = 0; k < base_.size(); ++k) {
            const Mode& m = modes_[k];
            std::optional<PendingSwitch> cand;
            if (m.kind == Mode::idle) {
                cand = detect_wake(step, k, cfg1);
            } else if (m.kind == Mode::normal) {
                cand = detect_switch(step, k, cfg1);
            } else {
                cand = detect_sliding_end(step, k, cfg1);
            }
            if (cand && (!earliest || cand->time < earliest->time)) earliest = cand;
        }
        return earliest;
    }

    std::optional<PendingSwitch> detect_wake(const ode::Step& step, std::size_t k,
                                             const Configuration& cfg1) {
        const Vec2 f1 = total_force(cfg1, k);
        if (norm(f1) <= kForceWake) return std::nullopt;
        const auto fmag = [&](double, const std::vector<double>& yy) {
            return norm(force_of(base_, yy, k)) - kForceWake;
        };
        const double g0v = fmag(step.t0, step.y0);
        double tw = step.t0;
        if (g0v < 0.0) tw = ode::bisect_time(step, fmag, step.t0, step.t1);
        PendingSwitch ps;
        ps.time = tw;
        ps.k = k;
        ps.silent = true;
        std::vector<double> yw;
        step.eval(tw, yw);
        const Vec2 fw = force_of(base_, yw, k);
        ps.new_mode = Mode{Mode::normal, argmax_direction(fw, gs_), -1, -1};
        return ps;
    }

    std::optional<PendingSwitch> detect_switch(const ode::Step& step, std::size_t k,
                                               const Configuration& cfg1) {
        const Mode& m = modes_[k];
        const Vec2 f1 = total_force(cfg1, k);
        const int best = argmax_direction(f1, gs_);
        if (best == m.dir) return std::nullopt;
        const Vec2& g_cur = gs_.directions[m.dir];
        const Vec2& g_new = gs_.directions[best];
        if (dot(f1, g_new) - dot(f1, g_cur) <= kTieTol * norm(f1)) return std::nullopt;
        const Vec2 g0 = g_new - g_cur;
        const auto ev = [&](double, const std::vector<double>& yy) {
            return dot(force_of(base_, yy, k), g0);
        };
        const double e0 = ev(step.t0, step.y0);
        const double ts = e0 < 0.0 ? ode::bisect_time(step, ev, step.t0, step.t1) : step.t0;

        std::vector<double> ys;
        step.eval(ts, ys);
        const Configuration cs = unpack(base_, ys);
        const Vec2 f = total_force(cs, k);
        const Vec2 n = surface_normal(cs, k, g0);
        const double sm = dot(dot(f, g_cur) * g_cur, n);
        const double sp = dot(dot(f, g_new) * g_new, n);

        PendingSwitch ps;
        ps.time = ts;
        ps.k = k;
        if (sm > 0.0 && sp < 0.0) {
            ps.kind = EventKind::sliding_begin;
            ps.new_mode = Mode{Mode::sliding, -1, m.dir, best};
        } else {
            ps.kind = EventKind::cross_slip;
            ps.new_mode = Mode{Mode::normal, best, -1, -1};
        }
        return ps;
    }

    // Sliding persists while the one-sided pushes have opposite signs
    // (equivalently, the blend weight is interior). When they align, both
    // fields point into one region and the trajectory exits tangentially
    // along that region's direction.
    std::optional<PendingSwitch> detect_sliding_end(const ode::Step& step, std::size_t k,
                                                    const Configuration& cfg1) {
        const Mode& m = modes_[k];
        const Vec2& gm = gs_.directions[m.gm];
        const Vec2& gp = gs_.directions[m.gp];
        const Vec2 g0 = gp - gm;
        const auto sides = [&](const Configuration& cfg) {
            const Vec2 f = total_force(cfg, k);
            const Vec2 n = surface_normal(cfg, k, g0);
            return std::pair<double, double>{dot(dot(f, gm) * gm, n), dot(dot(f, gp) * gp, n)};
        };
        const auto [sm1, sp1] = sides(cfg1);
        if (sm1 * sp1 < 0.0) return std::nullopt;  // still sliding

        const auto ev = [&](double, const std::vector<double>& yy) {
            const auto [a, b] = sides(unpack(base_, yy));
            return a * b;
        };
        const double e0 = ev(step.t0, step.y0);
        const double ts = e0 < 0.0 ? ode::bisect_time(step, ev, step.t0, step.t1) : step.t0;
        std::vector<double> ys;
        step.eval(ts, ys);
        const auto [sm, sp] = sides(unpack(base_, ys));
        const double decisive = std::abs(sm) > std::abs(sp) ? sm : sp;
        PendingSwitch ps;
        ps.time = ts;
        ps.k = k;
        ps.kind = EventKind::sliding_end;
        ps.new_mode = Mode{Mode::normal, decisive > 0.0 ? m.gp : m.gm, -1, -1};
        return ps;
    }

    // Newton projection of sliding disclinations back onto their switching
    // surface; keeps the residual F.g0 at rounding level between events.
    bool project_sliding(std::vector<double>& y) {
        bool changed = false;
        for (std::size_t k = 0; k < base_.size(); ++k) {
            const Mode& m = modes_[k];
            if (m.kind != Mode::sliding) continue;
            const Vec2 g0 = gs_.directions[m.gp] - gs_.directions[m.gm];
            for (int it = 0; it < 3; ++it) {
                const Configuration cfg = unpack(base_, y);
                const double e = dot(total_force(cfg, k), g0);
                const double scale = std::max(1.0, norm(total_force(cfg, k)));
                if (std::abs(e) < 1e-11 * scale) break;
                const Vec2 grad = switch_gradient(cfg, k, g0);
                const double gn2 = norm_sq(grad);
                if (gn2 < 1e-20) break;
                const Vec2 delta = -(e / gn2) * grad;
                y[2 * k] += delta.x;
                y[2 * k + 1] += delta.y;
                changed = true;
            }
        }
        return changed;
    }

    ode::ObserverAction observe(const ode::Step& step, std::vector<double>& y) {
        const std::optional<PendingSwitch> ps = detect(step);
        if (ps) {
            tb_.advance(step, ps->time);
            pending_ = ps;
            step.eval(ps->time, pending_state_);
            return ode::ObserverAction::halt;
        }
        tb_.advance(step, step.t1);
        double vmax = 0.0;
        for (double v : step.f1) vmax = std::max(vmax, std::abs(v));
        if (vmax < kStationaryVel) {
            stationary_ = true;
            return ode::ObserverAction::halt;
        }
        if (project_sliding(y)) return ode::ObserverAction::state_modified;
        return ode::ObserverAction::proceed;
    }

    Configuration base_;
    GlideSet gs_;
    IntegratorSettings st_;
    detail::TraceBuilder tb_;
    std::vector<Mode> modes_;
    std::optional<PendingSwitch> pending_;
    std::vector<double> pending_state_;
    bool stationary_ = false;
};

}  // namespace

Trace integrate_inclusion(const Configuration& cfg0, const GlideSet& gs, const IntegratorSettings& st) {
    validate_settings(st);
    validate_configuration(cfg0);
    validate_glide_set(gs);
    GlideDriver driver(cfg0, gs, st);
    return driver.run();
}

}  // namespace disclin
