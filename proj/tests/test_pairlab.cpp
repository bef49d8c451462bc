#include <algorithm>
#include <cmath>
#include <vector>

#include "disclin/pairlab.hpp"
#include "doctest.h"

using namespace disclin;

// ---------------------------------------------------------------------------
// scalar dipole equation
// ---------------------------------------------------------------------------

TEST_CASE("dipole_rhs limiting behaviour") {
    // Small separations: G ~ 8 s^2 Delta log Delta < 0, with the principal
    // part dominating as Delta -> 0.
    for (double d : {1e-2, 1e-4, 1e-6}) {
        CHECK(dipole_rhs({d, 1.0}) < 0.0);
    }
    const double g8 = dipole_rhs({1e-8, 1.0});
    CHECK(g8 / (8.0 * 1e-8 * std::log(1e-8)) == doctest::Approx(1.0).epsilon(0.05));

    // Near the diameter: G ~ 4 s^2 (2 - Delta) > 0.
    const double g2 = dipole_rhs({1.999, 1.0});
    CHECK(g2 > 0.0);
    CHECK(g2 / (4.0 * (2.0 - 1.999)) == doctest::Approx(1.0).epsilon(0.005));

    // Frank angle scales the rate quadratically without moving the zero.
    CHECK(dipole_rhs({0.5, 2.0}) == doctest::Approx(4.0 * dipole_rhs({0.5, 1.0})).epsilon(1e-14));

    CHECK_THROWS_AS(dipole_rhs({0.0, 1.0}), ValidationError);
    CHECK_THROWS_AS(dipole_rhs({2.0, 1.0}), ValidationError);
    CHECK_THROWS_AS(dipole_rhs({1.0, 0.0}), ValidationError);
}

TEST_CASE("dipole equilibrium: location, residual, s-independence, grid agreement") {
    const double root = find_dipole_equilibrium(1.0);
    CHECK(root > 0.75);
    CHECK(root < 0.85);
    CHECK(std::abs(dipole_rhs({root, 1.0})) < 1e-10);
    CHECK(std::abs(find_dipole_equilibrium(0.5) - root) < 1e-12);
    CHECK(std::abs(find_dipole_equilibrium(2.0) - root) < 1e-12);

    // Independent coarse scan: the sign change brackets the same zero.
    double lo = 0.0, hi = 0.0;
    for (double d = 1e-6; d < 2.0 - 1e-6; d += 1e-3) {
        if (dipole_rhs({d, 1.0}) < 0.0 && dipole_rhs({d + 1e-3, 1.0}) > 0.0) {
            lo = d;
            hi = d + 1e-3;
            break;
        }
    }
    REQUIRE(lo > 0.0);
    CHECK(root >= lo);
    CHECK(root <= hi);

    // Fine 1e-6-resolution scan around the bracket agrees to within 1e-6.
    double fine = 0.0;
    for (double d = lo; d < hi; d += 1e-6) {
        if (dipole_rhs({d, 1.0}) < 0.0 && dipole_rhs({d + 1e-6, 1.0}) >= 0.0) {
            fine = d + 5e-7;
            break;
        }
    }
    REQUIRE(fine > 0.0);
    CHECK(std::abs(fine - root) <= 1e-6);
}

TEST_CASE("dipole basin dichotomy") {
    // Below the equilibrium: strictly decreasing, reaching small separations.
    const ScalarTrace down = simulate_dipole(0.4, 1.0, 1.0);
    REQUIRE(down.samples.size() > 2);
    for (std::size_t i = 1; i < down.samples.size(); ++i) {
        CHECK(down.samples[i].delta < down.samples[i - 1].delta);
    }
    CHECK(down.samples.back().delta < 0.05);

    // Above: strictly increasing, approaching the diameter.
    const ScalarTrace up = simulate_dipole(1.2, 1.0, 1.0);
    REQUIRE(up.samples.size() > 2);
    for (std::size_t i = 1; i < up.samples.size(); ++i) {
        CHECK(up.samples[i].delta > up.samples[i - 1].delta);
    }
    CHECK(up.samples.back().delta > 1.95);
}

TEST_CASE("dipole equilibrium is unstable") {
    const double root = find_dipole_equilibrium(1.0);
    const ScalarTrace below = simulate_dipole(root - 1e-3, 1.0, 1.0);
    const ScalarTrace above = simulate_dipole(root + 1e-3, 1.0, 1.0);
    CHECK(below.samples.back().delta < root - 1e-3);
    CHECK(above.samples.back().delta > root + 1e-3);
    // Drift away is monotone.
    for (std::size_t i = 1; i < below.samples.size(); ++i) {
        CHECK(below.samples[i].delta <= below.samples[i - 1].delta);
    }
    for (std::size_t i = 1; i < above.samples.size(); ++i) {
        CHECK(above.samples[i].delta >= above.samples[i - 1].delta);
    }
}

TEST_CASE("scalar dipole matches the full two-disclination simulation") {
    const double delta0 = 0.4;
    IntegratorSettings st;
    st.t_end = 1.0;
    const ScalarTrace scalar = simulate_dipole(delta0, 1.0, st.t_end, st);
    const Trace full = simulate(
        {{1.0, {delta0 / 2, 0.0}}, {-1.0, {-delta0 / 2, 0.0}}}, st);
    const std::size_t n = std::min(scalar.samples.size(), full.samples.size());
    REQUIRE(n > 20);
    std::size_t compared = 0;
    for (std::size_t i = 0; i < n; ++i) {
        REQUIRE(scalar.samples[i].time ==
                doctest::Approx(full.samples[i].time).epsilon(1e-12));
        if (scalar.samples[i].delta < 0.02) break;  // both near collapse
        const double d_full =
            norm((full.samples[i].cfg[0].pos - full.samples[i].cfg[1].pos));
        CHECK(std::abs(scalar.samples[i].delta - d_full) < 1e-6);
        ++compared;
    }
    CHECK(compared > 20);
}

TEST_CASE("dipole collapse ends with a step_collapse event") {
    const ScalarTrace tr = simulate_dipole(0.4, 1.0, 2.0);
    REQUIRE(!tr.events.empty());
    CHECK(tr.events.back().kind == EventKind::step_collapse);
    CHECK(tr.events.back().time < 2.0);
    CHECK(tr.samples.back().time <= tr.events.back().time + 1e-12);
}

// ---------------------------------------------------------------------------
// asymptotic branches
// ---------------------------------------------------------------------------

TEST_CASE("dipole_asymptotic branch domains and endpoints") {
    // Both branches reproduce delta0 at T = 0.
    CHECK(dipole_asymptotic(0.03, 1.0, 0.0, AsymptoticBranch::near_zero) ==
          doctest::Approx(0.03).epsilon(1e-14));
    CHECK(dipole_asymptotic(1.97, 1.0, 0.0, AsymptoticBranch::near_two) == 1.97);

    // near_two tends to the diameter.
    CHECK(dipole_asymptotic(1.95, 1.0, 10.0, AsymptoticBranch::near_two) ==
          doctest::Approx(2.0).epsilon(1e-10));
    // near_zero decays doubly exponentially.
    CHECK(dipole_asymptotic(0.05, 1.0, 0.5, AsymptoticBranch::near_zero) <
          1e-30);

    CHECK_THROWS_AS(dipole_asymptotic(0.06, 1.0, 0.1, AsymptoticBranch::near_zero),
                    BranchDomainError);
    CHECK_THROWS_AS(dipole_asymptotic(1.9, 1.0, 0.1, AsymptoticBranch::near_two),
                    BranchDomainError);
    CHECK_THROWS_AS(dipole_asymptotic(0.0, 1.0, 0.1, AsymptoticBranch::near_zero),
                    BranchDomainError);
    CHECK_THROWS_AS(dipole_asymptotic(2.0, 1.0, 0.1, AsymptoticBranch::near_two),
                    BranchDomainError);
}

TEST_CASE("near-zero branch is a tight lower bound deep in its domain") {
    // Start deep enough that the neglected O(1) term in the log-derivative is
    // small against 2 log Delta for the whole (short) life of the dipole.
    const double delta0 = 1e-11;
    IntegratorSettings st;
    st.t_end = 0.02;
    st.sample_interval = 2e-4;
    st.abs_tol = 1e-15;  // keep absolute error below the tiny state values
    const ScalarTrace tr = simulate_dipole(delta0, 1.0, st.t_end, st);
    REQUIRE(tr.samples.size() > 10);
    for (const ScalarSample& s : tr.samples) {
        const double a = dipole_asymptotic(delta0, 1.0, s.time, AsymptoticBranch::near_zero);
        CHECK(a <= s.delta * (1.0 + 1e-9));               // lower bound
        CHECK(std::abs(a - s.delta) / s.delta < 0.05);    // within 5 percent
    }
}

// ---------------------------------------------------------------------------
// effective superposed pair
// ---------------------------------------------------------------------------

TEST_CASE("effective_pair_rhs closed forms") {
    // Equal magnitudes: the multiplier vanishes identically.
    PairRhs r = effective_pair_rhs({1.0, 1.0, {0.4, -0.2}});
    CHECK(r.multiplier.x == 0.0);
    CHECK(r.multiplier.y == 0.0);
    r = effective_pair_rhs({-2.0, 2.0, {0.1, 0.3}});
    CHECK(r.multiplier.x == 0.0);
    CHECK(r.multiplier.y == 0.0);

    // Zero total charge: the pair is stationary.
    r = effective_pair_rhs({1.0, -1.0, {0.4, -0.2}});
    CHECK(r.velocity.x == 0.0);
    CHECK(r.velocity.y == 0.0);

    // Frozen reference: s = (1, 2) at (0.5, 0).
    r = effective_pair_rhs({1.0, 2.0, {0.5, 0.0}});
    // velocity = 2 * (9/2) * 0.75 * (0.5, 0) = (3.375, 0), exact in binary.
    CHECK(r.velocity.x == doctest::Approx(3.375).epsilon(1e-15));
    CHECK(r.velocity.y == 0.0);
    // multiplier = (4 - 1) * 0.75 * (0.5, 0) = (1.125, 0), exact in binary.
    CHECK(r.multiplier.x == 1.125);
    CHECK(r.multiplier.y == 0.0);

    // The effective dynamics is the single-disclination flow at s_e.
    const EffectivePair ep{1.0, 2.0, {0.3, 0.4}};
    const Configuration one{{ep.s_eff(), ep.pos}};
    const Vec2 f = total_force(one, 0);
    r = effective_pair_rhs(ep);
    CHECK(r.velocity.x == doctest::Approx(f.x).epsilon(1e-14));
    CHECK(r.velocity.y == doctest::Approx(f.y).epsilon(1e-14));

    CHECK_THROWS_AS(effective_pair_rhs({0.0, 1.0, {0.1, 0.1}}), ValidationError);
    CHECK_THROWS_AS(effective_pair_rhs({1.0, 1.0, {1.0, 0.0}}), ValidationError);
}

// ---------------------------------------------------------------------------
// constrained pair at fixed offset
// ---------------------------------------------------------------------------

TEST_CASE("constrained pair holds the offset exactly") {
    const Vec2 eps{1e-3, 0.0};
    const ConstrainedTrace tr = simulate_constrained_eps(1.0, 2.0, {0.3, 0.0}, eps, 0.3);
    REQUIRE(tr.samples.size() > 10);
    for (const ConstrainedSample& s : tr.samples) {
        CHECK(s.xi2.x == s.xi1.x - eps.x);  // substituted exactly, bit for bit
        CHECK(s.xi2.y == s.xi1.y - eps.y);
    }
    for (std::size_t i = 1; i < tr.samples.size(); ++i) {
        CHECK(tr.samples[i].time > tr.samples[i - 1].time);
    }
}

TEST_CASE("constrained pair converges to the effective trajectory as eps -> 0") {
    const Vec2 xi10{0.3, 0.0};
    IntegratorSettings st;
    st.t_end = 0.3;
    const double s_eff = 3.0 / std::sqrt(2.0);

    double prev_gap = 1e300;
    for (double e : {1e-2, 1e-3}) {
        const ConstrainedTrace tr =
            simulate_constrained_eps(1.0, 2.0, xi10, {e, 0.0}, st.t_end, st);
        double gap = 0.0;
        for (const ConstrainedSample& s : tr.samples) {
            const Vec2 ref = analytic_single(s_eff, 0.3, 0.0, s.time);
            gap = std::max(gap, norm((s.xi1 - ref)));
        }
        CHECK(gap < prev_gap);
        prev_gap = gap;
    }
    CHECK(prev_gap < 5e-3);
}

TEST_CASE("balanced constrained pair is stationary up to the offset scale") {
    const Vec2 eps{1e-3, 0.0};
    const ConstrainedTrace tr = simulate_constrained_eps(1.0, -1.0, {0.3, 0.1}, eps, 1.0);
    REQUIRE(!tr.samples.empty());
    const Vec2 start = tr.samples.front().xi1;
    for (const ConstrainedSample& s : tr.samples) {
        CHECK(norm((s.xi1 - start)) < 1e-3);
    }
}

TEST_CASE("constrained-pair multiplier matches the superposed limit") {
    // For small eps the recovered multiplier approaches the closed form
    // (s2^2 - s1^2)(1 - |p|^2) p of the exactly superposed pair.
    const Vec2 xi10{0.3, 0.1};
    const ConstrainedTrace tr =
        simulate_constrained_eps(0.5, 1.0, xi10, {1e-7, 0.0}, 1e-3);
    REQUIRE(!tr.samples.empty());
    const ConstrainedSample& s0 = tr.samples.front();
    const PairRhs r = effective_pair_rhs({0.5, 1.0, xi10});
    CHECK(s0.lambda.x == doctest::Approx(r.multiplier.x).epsilon(1e-3));
    CHECK(s0.lambda.y == doctest::Approx(r.multiplier.y).epsilon(1e-3));
}

TEST_CASE("constrained pair validates its inputs") {
    CHECK_THROWS_AS(simulate_constrained_eps(1.0, 1.0, {0.3, 0.0}, {0.0, 0.0}, 1.0),
                    ValidationError);
    CHECK_THROWS_AS(simulate_constrained_eps(0.0, 1.0, {0.3, 0.0}, {1e-3, 0.0}, 1.0),
                    ValidationError);
    CHECK_THROWS_AS(simulate_constrained_eps(1.0, 1.0, {1.2, 0.0}, {1e-3, 0.0}, 1.0),
                    ValidationError);
}
