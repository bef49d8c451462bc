#pragma once

#include <cmath>
#include <vector>

#include "disclin/flow.hpp"
#include "disclin/model.hpp"

// Reduced two-disclination models: the symmetric zero-total-charge dipole as
// a scalar ODE in the separation, its small- and large-separation
// asymptotics, and the constrained superposed-pair dynamics with the
// Lagrange multiplier of the superposition constraint.

namespace disclin {

// Symmetric dipole (+s, -s) described by its separation Delta in (0, 2).
struct DipoleState {
    double delta = 1.0;
    double s = 1.0;
};

// Exactly superposed pair treated as one effective disclination with
// Frank angle s_e = (s1 + s2) / sqrt(2).
struct EffectivePair {
    double s1 = 1.0;
    double s2 = 1.0;
    Vec2 pos{};

    double s_eff() const { return (s1 + s2) / std::sqrt(2.0); }
};

struct ScalarSample {
    double time = 0.0;
    double delta = 0.0;
};

struct ScalarTrace {
    std::vector<ScalarSample> samples;
    std::vector<Event> events;
};

struct ConstrainedSample {
    double time = 0.0;
    Vec2 xi1{};
    Vec2 xi2{};     // xi1 - eps by construction; the constraint holds exactly
    Vec2 lambda{};  // reaction: +lambda acts on xi1, -lambda on xi2
};

struct ConstrainedTrace {
    std::vector<ConstrainedSample> samples;
    std::vector<Event> events;
};

// Forcing term of the scalar dipole equation dDelta/dT = G(Delta):
//   G(Delta) = 4 s^2 Delta [ (4-Delta^2)/(4+Delta^2) + 2 log(4 Delta/(4+Delta^2)) ].
// Negative for small Delta, positive toward Delta = 2, with a unique zero.
double dipole_rhs(const DipoleState& st);

// Unique zero of G in (0, 2) by bisection to absolute tolerance 1e-12.
// Independent of s (which scales G without moving the root).
double find_dipole_equilibrium(double s);

// Integrates the scalar dipole equation from delta0 with the shared RK4(5)
// machinery. Monotone away from the unstable equilibrium: decreasing toward 0
// below it, increasing toward 2 above it. Ends early with a step_collapse
// event when Delta falls below the separation guard.
ScalarTrace simulate_dipole(double delta0, double s, double t_end);
ScalarTrace simulate_dipole(double delta0, double s, double t_end, const IntegratorSettings& st);

enum class AsymptoticBranch { near_zero, near_two };

// Principal-part solutions of the dipole equation:
//   near_zero: Delta(T) = exp[ log(delta0) * exp(8 s^2 T) ]   (delta0 <= 0.05)
//   near_two:  Delta(T) = 2 - (2 - delta0) exp(-4 s^2 T)      (delta0 >= 1.95)
// Throws BranchDomainError when delta0 lies outside the branch neighborhood.
double dipole_asymptotic(double delta0, double s, double T, AsymptoticBranch branch);

struct PairRhs {
    Vec2 velocity{};    // common velocity of the superposed pair
    Vec2 multiplier{};  // constraint reaction lambda
};

// Effective dynamics of an exactly superposed pair:
//   velocity = 2 s_e^2 (1-|p|^2) p,  lambda = (s2^2 - s1^2)(1-|p|^2) p.
PairRhs effective_pair_rhs(const EffectivePair& ep);

// Constrained dynamics at fixed small offset eps: integrates
//   dxi1/dT = (F1 + F2)/2 evaluated at (xi1, xi1 - eps),
// with xi2 = xi1 - eps substituted exactly and the multiplier recovered as
// lambda = (F2 - F1)/2. As |eps| -> 0 the xi1 trajectory converges to the
// effective-pair trajectory.
ConstrainedTrace simulate_constrained_eps(double s1, double s2, const Vec2& xi10, const Vec2& eps,
                                          double t_end);
ConstrainedTrace simulate_constrained_eps(double s1, double s2, const Vec2& xi10, const Vec2& eps,
                                          double t_end, const IntegratorSettings& st);

}  // namespace disclin
