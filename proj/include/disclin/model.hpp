#pragma once

#include <cstddef>
#include <vector>

#include "disclin/errors.hpp"
#include "disclin/vec2.hpp"

// Closed-form nondimensional energy, pair ratios, and force decomposition for
// N wedge disclinations in the unit disk. All lengths are in units of the disk
// radius, energies in units of C = E R^2 / (16 pi (1 - nu^2)), and time in the
// nondimensional scale T = (lambda C / R^2) t.

namespace disclin {

// One wedge disclination: a nonzero Frank angle s and a position in the
// closed unit disk. Positions with |pos| = 1 are legal for evaluation only;
// dynamic states stay strictly interior.
struct Disclination {
    double s = 1.0;
    Vec2 pos{};
};

// Ordered list of disclinations; the state of the dynamics.
using Configuration = std::vector<Disclination>;

// Dimensional material and kinetic scales. Only used by the
// time-scale conversion helper; the simulation itself is nondimensional.
struct PhysicalScales {
    double young_modulus = 1.0;  // E > 0
    double poisson_ratio = 0.0;  // nu in (-1, 0.5)
    double radius = 1.0;         // R > 0
    double mobility = 1.0;       // lambda > 0
};

// Pairs closer than this are treated as superposed; energy and forces refuse
// them (CoincidentPositionsError) and callers use the superposed/constrained
// model instead.
inline constexpr double kMinSeparation = 1e-12;

// Interaction ratio Phi = d^2 / (d^2 + (1-|a|^2)(1-|b|^2)), d = |a-b|.
// Lies in (0,1) for distinct interior points and reaches 1 only when a or b
// is on the boundary.
double pair_ratio(const Vec2& a, const Vec2& b);

// log(pair_ratio(a, b)) evaluated as log(d^2) - log(d^2 + q) so that values
// near the boundary (q -> 0) do not lose precision to cancellation.
double log_pair_ratio(const Vec2& a, const Vec2& b);

// Total elastic energy
//   H = 1/2 sum_k s_k^2 (1-|p_k|^2)^2
//     + sum_{k<h} s_k s_h (1-|p_k|^2)(1-|p_h|^2)
//     + sum_{k<h} s_k s_h |p_k-p_h|^2 log Phi_kh.
// Zero when every disclination sits on the boundary.
double energy(const Configuration& cfg);

// Energy of two exactly superposed disclinations at p: 1/2 (s1+s2)^2 (1-|p|^2)^2.
double superposed_energy(double s1, double s2, const Vec2& p);

// Self-interaction (image) force 2 s^2 (1-|p|^2) p: radial, vanishing at the
// origin and on the boundary.
Vec2 force_self(const Disclination& d);

// Boundary-mediated pair force on k: 2 s_k s_h (1-Phi)(1-|p_h|^2) p_k.
Vec2 force_boundary_pair(const Disclination& k, const Disclination& h);

// Direct mutual force on k: 2 s_k s_h (1-Phi+log Phi)(p_h - p_k). The scalar
// factor 1-Phi+log Phi is strictly negative on (0,1), so like charges repel
// and opposite charges attract.
Vec2 force_mutual_pair(const Disclination& k, const Disclination& h);

// Full force on disclination k: self + boundary-pair + mutual-pair sums.
// Equals minus the gradient of energy() with respect to p_k.
Vec2 total_force(const Configuration& cfg, std::size_t k);

// Forces on every disclination; one evaluation of the pair terms per pair.
std::vector<Vec2> total_forces(const Configuration& cfg);

// Energy scale C = E R^2 / (16 pi (1 - nu^2)).
double energy_scale(const PhysicalScales& ps);

// Nondimensional time T = (lambda C / R^2) t for a physical time t.
double to_nondimensional(const PhysicalScales& ps, double t_physical);

// Throws ValidationError naming the violated invariant: empty list, zero
// Frank angle, positions outside the disk (strictly interior when
// require_interior), or a pair below the separation guard.
void validate_configuration(const Configuration& cfg, bool require_interior = true);

}  // namespace disclin
