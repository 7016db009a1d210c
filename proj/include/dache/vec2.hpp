// SPDX-FileCopyrightText: 2026 The dache authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>

namespace dache {

/// Plain 2D vector, double precision. Used for positions, velocities and
/// surface normals alike.
struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2() = default;
  constexpr Vec2(double x_, double y_) : x(x_), y(y_) {}

  constexpr Vec2 operator+(const Vec2& r) const { return {x + r.x, y + r.y}; }
  constexpr Vec2 operator-(const Vec2& r) const { return {x - r.x, y - r.y}; }
  constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
  friend constexpr Vec2 operator*(double s, const Vec2& v) { return v * s; }
  constexpr Vec2 operator-() const { return {-x, -y}; }

  Vec2& operator+=(const Vec2& r) {
    x += r.x;
    y += r.y;
    return *this;
  }
  Vec2& operator-=(const Vec2& r) {
    x -= r.x;
    y -= r.y;
    return *this;
  }
  Vec2& operator*=(double s) {
    x *= s;
    y *= s;
    return *this;
  }

  constexpr bool operator==(const Vec2& r) const = default;

  constexpr double dot(const Vec2& r) const { return x * r.x + y * r.y; }
  constexpr double norm2() const { return x * x + y * y; }
  double norm() const { return std::hypot(x, y); }

  /// Left-hand perpendicular (rotation by +90 degrees).
  constexpr Vec2 perp() const { return {-y, x}; }

  /// Unit vector in the same direction; {0,0} for near-zero input.
  Vec2 normalized(double eps = 1e-300) const {
    const double n = norm();
    if (n <= eps) return {0.0, 0.0};
    return {x / n, y / n};
  }

  /// Counter-clockwise rotation by `angle` radians.
  Vec2 rotated(double angle) const {
    const double c = std::cos(angle);
    const double s = std::sin(angle);
    return {c * x - s * y, s * x + c * y};
  }
};

/// Specular reflection v' = v - 2 (v.n) n for a unit normal n.
/// Preserves |v| and is an involution.
inline Vec2 reflect(const Vec2& v, const Vec2& unit_normal) {
  const double k = v.dot(unit_normal);
  return v - 2.0 * k * unit_normal;
}

/// Distance from point p to the segment [a, b].
inline double distance_to_segment(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 ab = b - a;
  const double len2 = ab.norm2();
  if (len2 == 0.0) return (p - a).norm();
  double s = (p - a).dot(ab) / len2;
  s = s < 0.0 ? 0.0 : (s > 1.0 ? 1.0 : s);
  return (p - (a + ab * s)).norm();
}

}  // namespace dache
