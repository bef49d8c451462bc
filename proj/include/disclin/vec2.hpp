#pragma once

#include <cmath>

namespace disclin {

// Plain 2-vector used for positions, forces, velocities, and glide directions.
struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2& operator+=(const Vec2& o) { x += o.x; y += o.y; return *this; }
    Vec2& operator-=(const Vec2& o) { x -= o.x; y -= o.y; return *this; }
    Vec2& operator*=(double c) { x *= c; y *= c; return *this; }
};

inline Vec2 operator+(Vec2 a, const Vec2& b) { return a += b; }
inline Vec2 operator-(Vec2 a, const Vec2& b) { return a -= b; }
inline Vec2 operator-(const Vec2& a) { return {-a.x, -a.y}; }
inline Vec2 operator*(double c, Vec2 a) { return a *= c; }
inline Vec2 operator*(Vec2 a, double c) { return a *= c; }
inline Vec2 operator/(Vec2 a, double c) { return a *= (1.0 / c); }
inline bool operator==(const Vec2& a, const Vec2& b) { return a.x == b.x && a.y == b.y; }

inline double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }

// z-component of the 3-d cross product; twice the signed area of the triangle (0, a, b).
inline double cross(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }

inline double norm_sq(const Vec2& a) { return a.x * a.x + a.y * a.y; }
inline double norm(const Vec2& a) { return std::hypot(a.x, a.y); }

inline Vec2 normalized(const Vec2& a) {
    const double n = norm(a);
    return {a.x / n, a.y / n};
}

inline Vec2 rotated(const Vec2& a, double theta) {
    const double c = std::cos(theta), s = std::sin(theta);
    return {c * a.x - s * a.y, s * a.x + c * a.y};
}

}  // namespace disclin
