#include <algorithm>
#include <cmath>
#include <vector>

#include "disclin/flow.hpp"
#include "doctest.h"

using namespace disclin;

namespace {

bool has_event(const Trace& tr, EventKind k) {
    return std::any_of(tr.events.begin(), tr.events.end(),
                       [&](const Event& e) { return e.kind == k; });
}

double pair_distance(const Sample& s) {
    return norm((s.cfg[0].pos - s.cfg[1].pos));
}

}  // namespace

// ---------------------------------------------------------------------------
// settings validation
// ---------------------------------------------------------------------------

TEST_CASE("integrator settings are validated") {
    IntegratorSettings st;
    CHECK_NOTHROW(validate_settings(st));

    st = IntegratorSettings{};
    st.rel_tol = 0.0;
    CHECK_THROWS_AS(validate_settings(st), ValidationError);

    st = IntegratorSettings{};
    st.rel_tol = 1e-2;  // above the accuracy cap
    CHECK_THROWS_AS(validate_settings(st), ValidationError);

    st = IntegratorSettings{};
    st.abs_tol = -1e-9;
    CHECK_THROWS_AS(validate_settings(st), ValidationError);

    st = IntegratorSettings{};
    st.max_step = 0.0;
    CHECK_THROWS_AS(validate_settings(st), ValidationError);

    st = IntegratorSettings{};
    st.t_end = 0.0;
    CHECK_THROWS_AS(validate_settings(st), ValidationError);

    st = IntegratorSettings{};
    st.sample_interval = 0.0;
    CHECK_THROWS_AS(validate_settings(st), ValidationError);

    st = IntegratorSettings{};
    st.collision_distance = 2.0;  // must be < 2 (disk diameter)
    CHECK_THROWS_AS(validate_settings(st), ValidationError);

    st = IntegratorSettings{};
    st.boundary_margin = 1.0;
    CHECK_THROWS_AS(validate_settings(st), ValidationError);
}

// ---------------------------------------------------------------------------
// analytic single-disclination solution
// ---------------------------------------------------------------------------

TEST_CASE("analytic_single basics") {
    // T = 0 returns the initial point.
    const Vec2 p0 = analytic_single(1.0, 0.5, 0.3, 0.0);
    CHECK(p0.x == doctest::Approx(0.5 * std::cos(0.3)).epsilon(1e-15));
    CHECK(p0.y == doctest::Approx(0.5 * std::sin(0.3)).epsilon(1e-15));

    // mu0 = 1 at rho0 = 1/sqrt(2): rho(T) = 1/sqrt(1 + exp(-4 s^2 T)).
    const double rho0 = 1.0 / std::sqrt(2.0);
    const Vec2 p = analytic_single(1.0, rho0, 0.0, 0.3);
    CHECK(p.x == doctest::Approx(1.0 / std::sqrt(1.0 + std::exp(-1.2))).epsilon(1e-14));
    CHECK(p.y == 0.0);

    // Large-T expansion: 1 - rho ~ (mu0 / 2) exp(-4 s^2 T).
    const double rho = analytic_single(1.0, rho0, 0.0, 3.0).x;
    CHECK(1.0 - rho == doctest::Approx(0.5 * std::exp(-12.0)).epsilon(1e-4));

    // The polar angle never changes.
    const double phi0 = 1.234;
    for (double T : {0.1, 0.7, 2.0}) {
        const Vec2 q = analytic_single(-2.0, 0.3, phi0, T);
        CHECK(std::atan2(q.y, q.x) == doctest::Approx(phi0).epsilon(1e-14));
    }

    CHECK_THROWS_AS(analytic_single(1.0, 0.0, 0.0, 1.0), ValidationError);
    CHECK_THROWS_AS(analytic_single(1.0, 1.0, 0.0, 1.0), ValidationError);
    CHECK_THROWS_AS(analytic_single(0.0, 0.5, 0.0, 1.0), ValidationError);
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

TEST_CASE("a disclination at the origin is stationary") {
    IntegratorSettings st;
    st.t_end = 0.5;
    const Trace tr = simulate({{1.0, {0.0, 0.0}}}, st);
    REQUIRE(!tr.samples.empty());
    REQUIRE(!tr.events.empty());
    CHECK(tr.events.front().kind == EventKind::stationary);
    CHECK(tr.events.front().time == 0.0);
    for (const Sample& s : tr.samples) {
        CHECK(s.cfg[0].pos.x == 0.0);
        CHECK(s.cfg[0].pos.y == 0.0);
    }
    // The sample grid still covers [0, t_end].
    CHECK(tr.samples.back().time == doctest::Approx(st.t_end).epsilon(1e-12));
}

TEST_CASE("single disclination follows the analytic radial solution") {
    IntegratorSettings st;
    st.t_end = 1.0;
    const double phi0 = 0.7;
    const Configuration cfg0{{1.0, {0.5 * std::cos(phi0), 0.5 * std::sin(phi0)}}};
    const Trace tr = simulate(cfg0, st);
    REQUIRE(tr.samples.size() > 50);
    for (const Sample& s : tr.samples) {
        const Vec2 ref = analytic_single(1.0, 0.5, phi0, s.time);
        CHECK(norm((s.cfg[0].pos - ref)) < 1e-6);
        // Angular drift stays at integrator noise level.
        const double ang = std::atan2(s.cfg[0].pos.y, s.cfg[0].pos.x);
        CHECK(std::abs(ang - phi0) < 1e-9);
    }
}

TEST_CASE("opposite charges collide: events and monotone approach") {
    IntegratorSettings st;
    st.t_end = 1.0;
    const Trace tr = simulate({{1.0, {0.2, 0.0}}, {-1.0, {-0.2, 0.0}}}, st);
    REQUIRE(tr.samples.size() > 2);

    // Distance decreases monotonically along the whole approach.
    for (std::size_t i = 1; i < tr.samples.size(); ++i) {
        CHECK(pair_distance(tr.samples[i]) < pair_distance(tr.samples[i - 1]) + 1e-12);
    }

    REQUIRE(has_event(tr, EventKind::collision_begin));
    REQUIRE(has_event(tr, EventKind::step_collapse));
    double t_begin = -1.0, t_end_ev = -1.0;
    for (const Event& e : tr.events) {
        if (e.kind == EventKind::collision_begin) {
            t_begin = e.time;
            CHECK(e.a == 0);
            CHECK(e.b == 1);
        }
        if (e.kind == EventKind::step_collapse) t_end_ev = e.time;
    }
    CHECK(t_begin >= 0.0);
    CHECK(t_begin < t_end_ev);
    // The trace ends at the collapse, before the nominal horizon.
    CHECK(tr.samples.back().time <= t_end_ev + 1e-12);
    CHECK(t_end_ev < st.t_end);

    // Event times are sorted.
    for (std::size_t i = 1; i < tr.events.size(); ++i) {
        CHECK(tr.events[i - 1].time <= tr.events[i].time + 1e-15);
    }
}

TEST_CASE("trajectories stay inside the disk and report boundary approach") {
    // A strong single charge rushes outward and crosses the reporting margin
    // early, yet the position never leaves the open disk.
    IntegratorSettings st;
    st.t_end = 0.6;
    const Trace tr = simulate({{2.0, {0.3, 0.0}}}, st);
    REQUIRE(!tr.samples.empty());
    for (const Sample& s : tr.samples) {
        CHECK(norm(s.cfg[0].pos) < 1.0);
    }
    CHECK(has_event(tr, EventKind::boundary_approach));

    // A two-charge near miss stays confined as well.
    IntegratorSettings st2;
    st2.t_end = 1.6;
    const Trace tr2 = simulate({{1.0, {0.3, 0.0}}, {-2.0, {-0.3, 0.0}}}, st2);
    REQUIRE(!tr2.samples.empty());
    for (const Sample& s : tr2.samples) {
        for (const auto& d : s.cfg) CHECK(norm(d.pos) < 1.0);
    }
}

TEST_CASE("energy is non-increasing along sampled trajectories") {
    IntegratorSettings st;
    st.t_end = 1.6;
    const Trace tr = simulate({{1.0, {0.3, 0.0}}, {-2.0, {-0.3, 0.0}}}, st);
    for (std::size_t i = 1; i < tr.samples.size(); ++i) {
        CHECK(tr.samples[i].energy <= tr.samples[i - 1].energy + 10.0 * st.abs_tol);
    }
}

TEST_CASE("sample grid and stored derived quantities are consistent") {
    IntegratorSettings st;
    st.t_end = 0.25;
    const Configuration cfg0{{1.0, {0.5, 0.0}}};
    const Trace tr = simulate(cfg0, st);
    REQUIRE(tr.samples.size() == 26);  // t = 0, 0.01, ..., 0.25
    for (std::size_t i = 0; i < tr.samples.size(); ++i) {
        const Sample& s = tr.samples[i];
        CHECK(s.time == doctest::Approx(i * st.sample_interval).epsilon(1e-12));
        CHECK(s.energy == doctest::Approx(energy(s.cfg)).epsilon(1e-12));
        REQUIRE(s.forces.size() == s.cfg.size());
        const auto f = total_forces(s.cfg);
        for (std::size_t k = 0; k < f.size(); ++k) {
            CHECK(s.forces[k].x == doctest::Approx(f[k].x).epsilon(1e-12));
            CHECK(s.forces[k].y == doctest::Approx(f[k].y).epsilon(1e-12));
        }
    }
    for (std::size_t i = 1; i < tr.samples.size(); ++i) {
        CHECK(tr.samples[i].time > tr.samples[i - 1].time);
    }
}

TEST_CASE("simulate is deterministic") {
    IntegratorSettings st;
    st.t_end = 0.7;
    const Configuration cfg0{{1.0, {0.3, 0.0}}, {-2.0, {-0.3, 0.0}}};
    const Trace a = simulate(cfg0, st);
    const Trace b = simulate(cfg0, st);
    REQUIRE(a.samples.size() == b.samples.size());
    for (std::size_t i = 0; i < a.samples.size(); ++i) {
        CHECK(a.samples[i].time == b.samples[i].time);
        for (std::size_t k = 0; k < a.samples[i].cfg.size(); ++k) {
            CHECK(a.samples[i].cfg[k].pos.x == b.samples[i].cfg[k].pos.x);
            CHECK(a.samples[i].cfg[k].pos.y == b.samples[i].cfg[k].pos.y);
        }
    }
    REQUIRE(a.events.size() == b.events.size());
    for (std::size_t i = 0; i < a.events.size(); ++i) {
        CHECK(a.events[i].kind == b.events[i].kind);
        CHECK(a.events[i].time == b.events[i].time);
    }
}

TEST_CASE("simulate validates its inputs") {
    IntegratorSettings st;
    CHECK_THROWS_AS(simulate({}, st), ValidationError);
    CHECK_THROWS_AS(simulate({{0.0, {0.1, 0.0}}}, st), ValidationError);
    CHECK_THROWS_AS(simulate({{1.0, {1.0, 0.0}}}, st), ValidationError);
    st.t_end = -1.0;
    CHECK_THROWS_AS(simulate({{1.0, {0.1, 0.0}}}, st), ValidationError);
}

// ---------------------------------------------------------------------------
// dissipation rate
// ---------------------------------------------------------------------------

TEST_CASE("energy_dissipation_rate identity") {
    // Stationary point: zero rate.
    CHECK(energy_dissipation_rate({{1.0, {0.0, 0.0}}}) == 0.0);

    // Generic point: equals -sum |F_k|^2 and is negative.
    Configuration cfg{{1.0, {0.2, 0.1}}, {-2.0, {-0.3, 0.4}}};
    const auto f = total_forces(cfg);
    double expect = 0.0;
    for (const auto& v : f) expect -= norm_sq(v);
    CHECK(energy_dissipation_rate(cfg) == doctest::Approx(expect).epsilon(1e-15));
    CHECK(energy_dissipation_rate(cfg) < 0.0);
}

TEST_CASE("dissipation rate matches finite differences of sampled energy") {
    IntegratorSettings st;
    st.t_end = 1.0;
    st.sample_interval = 0.002;
    // Samples come from the dense interpolant; cap the step so its error
    // stays below the finite-difference noise floor.
    st.max_step = 0.005;
    const Trace tr = simulate({{1.0, {0.3, 0.0}}, {-2.0, {-0.3, 0.0}}}, st);
    REQUIRE(tr.samples.size() > 200);
    double max_rate = 0.0;
    for (const Sample& s : tr.samples) {
        max_rate = std::max(max_rate, std::abs(energy_dissipation_rate(s.cfg)));
    }
    // Five-point stencil away from the endpoints on the smooth mid-range.
    const double dt = st.sample_interval;
    for (std::size_t i = 50; i + 50 < tr.samples.size(); ++i) {
        const auto& s = tr.samples;
        const double fd = (s[i - 2].energy - 8.0 * s[i - 1].energy + 8.0 * s[i + 1].energy -
                           s[i + 2].energy) /
                          (12.0 * dt);
        const double rate = energy_dissipation_rate(s[i].cfg);
        const double denom = std::max(std::abs(rate), 1e-3 * max_rate);
        CHECK(std::abs(fd - rate) / denom < 1e-4);
    }
}
