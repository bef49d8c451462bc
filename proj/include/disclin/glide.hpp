#pragma once

#include <vector>

#include "disclin/flow.hpp"
#include "disclin/model.hpp"

// Glide-constrained dynamics: each disclination moves only along directions
// from a finite symmetric set G, following the projected force on the most
// aligned direction. Crossings of the switching surfaces (where the top two
// directions exchange) are resolved as cross-slip (discrete switch) or fine
// cross-slip (Filippov sliding with the alpha-blended force).

namespace disclin {

// Finite set of admissible glide directions: unit vectors, closed under
// negation, spanning the plane, pairwise distinct, even count M >= 4.
struct GlideSet {
    std::vector<Vec2> directions;
};

GlideSet axes_glide_set();       // {+e1, -e1, +e2, -e2}
GlideSet hexagonal_glide_set();  // {+-(cos(j pi/3), sin(j pi/3)), j = 0, 1, 2}

// Throws InvalidGlideSetError naming the violated invariant.
void validate_glide_set(const GlideSet& gs);

enum class SelectionStatus {
    zero_force,  // F = 0: no preferred direction, projected force set is {0}
    unique,      // one strictly most aligned direction
    tie,         // force bisects two directions (within tie_tol * |F|)
};

struct DirectionSelection {
    SelectionStatus status = SelectionStatus::zero_force;
    std::vector<Vec2> directions;        // empty, one, or two unit vectors
    std::vector<Vec2> projected_forces;  // (F.g) g for each selected direction
};

// Picks the direction(s) of G most aligned with the force. A tie is declared
// when the top two dot products agree to within tie_tol * |force|.
DirectionSelection select_directions(const Vec2& force, const GlideSet& gs, double tie_tol = 1e-9);

enum class HullKind { zero, point, segment };

// Convex set of admissible velocities for one disclination: {0}, a single
// projected force, or the segment joining the two tied projected forces.
struct ForceHull {
    HullKind kind = HullKind::zero;
    Vec2 a{};  // point value, or first segment endpoint
    Vec2 b{};  // second segment endpoint (segment only)
};

ForceHull convexified_force(const DirectionSelection& sel);

// Filippov blending weight on a switching surface with normal N:
//   alpha = (F-.N) / (F-.N - F+.N), valid under F-.N > 0 and F+.N < 0
// (the fine cross-slip condition; anything else signals cross-slip and
// throws PreconditionError). The blend F0 = (1-alpha) F- + alpha F+
// satisfies F0.N = 0 exactly.
double sliding_coefficient(const Vec2& f_minus, const Vec2& f_plus, const Vec2& normal);

// Integrates the glide inclusion from cfg0: between events disclination k
// moves with velocity (F_k.g_k) g_k for its assigned direction g_k; crossing
// a switching surface is detected by the sign change of F_k.(g_new - g_cur)
// and classified via the one-sided projected forces against the surface
// normal (finite differences of the event function, step 1e-7): both
// positive -> cross_slip, opposite -> sliding with the alpha-blended field
// until the sliding condition fails (sliding_end, tangential exit).
// Collision/boundary events and terminal conditions behave as in simulate().
Trace integrate_inclusion(const Configuration& cfg0, const GlideSet& gs, const IntegratorSettings& st);

}  // namespace disclin
