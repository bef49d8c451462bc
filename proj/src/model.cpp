#include "disclin/model.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace disclin {

namespace {

// Squared "boundary weight" product q = (1-|a|^2)(1-|b|^2), clamped at zero:
// transient integrator stages may poke a hair past the rim, where the
// continuous extension (q = 0, Phi = 1) is the right value.
double boundary_product(const Vec2& a, const Vec2& b) {
    const double qa = 1.0 - norm_sq(a);
    const double qb = 1.0 - norm_sq(b);
    const double q = qa * qb;
    return q > 0.0 ? q : 0.0;
}

void check_separation(double d2) {
    if (d2 < kMinSeparation * kMinSeparation) {
        throw CoincidentPositionsError("positions closer than the 1e-12 separation guard");
    }
}

}  // namespace

double pair_ratio(const Vec2& a, const Vec2& b) {
    const double d2 = norm_sq(a - b);
    check_separation(d2);
    return d2 / (d2 + boundary_product(a, b));
}

double log_pair_ratio(const Vec2& a, const Vec2& b) {
    const double d2 = norm_sq(a - b);
    check_separation(d2);
    return std::log(d2) - std::log(d2 + boundary_product(a, b));
}

double energy(const Configuration& cfg) {
    double h = 0.0;
    for (const auto& d : cfg) {
        const double w = 1.0 - norm_sq(d.pos);
        h += 0.5 * d.s * d.s * w * w;
    }
    for (std::size_t k = 0; k + 1 < cfg.size(); ++k) {
        for (std::size_t j = k + 1; j < cfg.size(); ++j) {
            const Vec2& pk = cfg[k].pos;
            const Vec2& pj = cfg[j].pos;
            const double ss = cfg[k].s * cfg[j].s;
            const double d2 = norm_sq(pk - pj);
            check_separation(d2);
            h += ss * (1.0 - norm_sq(pk)) * (1.0 - norm_sq(pj));
            h += ss * d2 * log_pair_ratio(pk, pj);
        }
    }
    return h;
}

double superposed_energy(double s1, double s2, const Vec2& p) {
    const double s = s1 + s2;
    const double w = 1.0 - norm_sq(p);
    return 0.5 * s * s * w * w;
}

Vec2 force_self(const Disclination& d) {
    return 2.0 * d.s * d.s * (1.0 - norm_sq(d.pos)) * d.pos;
}

Vec2 force_boundary_pair(const Disclination& k, const Disclination& h) {
    const double phi = pair_ratio(k.pos, h.pos);
    return 2.0 * k.s * h.s * (1.0 - phi) * (1.0 - norm_sq(h.pos)) * k.pos;
}

Vec2 force_mutual_pair(const Disclination& k, const Disclination& h) {
    const double phi = pair_ratio(k.pos, h.pos);
    const double c = 1.0 - phi + log_pair_ratio(k.pos, h.pos);
    return 2.0 * k.s * h.s * c * (h.pos - k.pos);
}

Vec2 total_force(const Configuration& cfg, std::size_t k) {
    Vec2 f = force_self(cfg[k]);
    for (std::size_t h = 0; h < cfg.size(); ++h) {
        if (h == k) continue;
        f += force_boundary_pair(cfg[k], cfg[h]);
        f += force_mutual_pair(cfg[k], cfg[h]);
    }
    return f;
}

std::vector<Vec2> total_forces(const Configuration& cfg) {
    std::vector<Vec2> out(cfg.size());
    for (std::size_t k = 0; k < cfg.size(); ++k) {
        out[k] = force_self(cfg[k]);
    }
    for (std::size_t k = 0; k + 1 < cfg.size(); ++k) {
        for (std::size_t j = k + 1; j < cfg.size(); ++j) {
            const double phi = pair_ratio(cfg[k].pos, cfg[j].pos);
            const double lphi = log_pair_ratio(cfg[k].pos, cfg[j].pos);
            const double ss = 2.0 * cfg[k].s * cfg[j].s;
            const double wk = 1.0 - norm_sq(cfg[k].pos);
            const double wj = 1.0 - norm_sq(cfg[j].pos);
            const double c = 1.0 - phi + lphi;
            out[k] += ss * (1.0 - phi) * wj * cfg[k].pos + ss * c * (cfg[j].pos - cfg[k].pos);
            out[j] += ss * (1.0 - phi) * wk * cfg[j].pos + ss * c * (cfg[k].pos - cfg[j].pos);
        }
    }
    return out;
}

double energy_scale(const PhysicalScales& ps) {
    if (!(ps.young_modulus > 0.0)) throw InvalidScalesError("young_modulus must be positive");
    if (!(ps.radius > 0.0)) throw InvalidScalesError("radius must be positive");
    if (!(ps.poisson_ratio > -1.0 && ps.poisson_ratio < 0.5)) {
        throw InvalidScalesError("poisson_ratio must lie in (-1, 0.5)");
    }
    const double nu = ps.poisson_ratio;
    return ps.young_modulus * ps.radius * ps.radius / (16.0 * std::numbers::pi * (1.0 - nu * nu));
}

double to_nondimensional(const PhysicalScales& ps, double t_physical) {
    if (!(ps.mobility > 0.0)) throw InvalidScalesError("mobility must be positive");
    const double c = energy_scale(ps);
    return ps.mobility * c / (ps.radius * ps.radius) * t_physical;
}

void validate_configuration(const Configuration& cfg, bool require_interior) {
    if (cfg.empty()) throw ValidationError("configuration must contain at least one disclination");
    for (std::size_t k = 0; k < cfg.size(); ++k) {
        if (cfg[k].s == 0.0) {
            throw ValidationError("Frank angle of disclination " + std::to_string(k) +
                                  " must be nonzero");
        }
        const double r2 = norm_sq(cfg[k].pos);
        if (require_interior ? !(r2 < 1.0) : !(r2 <= 1.0)) {
            throw ValidationError("position of disclination " + std::to_string(k) +
                                  " must lie in the " +
                                  (require_interior ? std::string("open") : std::string("closed")) +
                                  " unit disk");
        }
    }
    for (std::size_t k = 0; k + 1 < cfg.size(); ++k) {
        for (std::size_t j = k + 1; j < cfg.size(); ++j) {
            if (norm_sq(cfg[k].pos - cfg[j].pos) < kMinSeparation * kMinSeparation) {
                throw ValidationError("disclinations " + std::to_string(k) + " and " +
                                      std::to_string(j) + " are superposed (below the separation guard)");
            }
        }
    }
}

}  // namespace disclin
