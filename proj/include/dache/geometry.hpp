// SPDX-FileCopyrightText: 2026 The dache authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "dache/errors.hpp"
#include "dache/rng.hpp"
#include "dache/vec2.hpp"

namespace dache {

/// Guard below which a root is treated as a re-detection of the surface the
/// ball just left. Normalized length units (default arenas have unit scale).
inline constexpr double kEventEpsilon = 1e-12;

/// Absolute slack for segment-extent and arc-angle membership tests, so that
/// corner and seam hits are claimed by at least one surface.
inline constexpr double kSeamSlack = 1e-9;

// ---------------------------------------------------------------------------
// Shapes
// ---------------------------------------------------------------------------

/// Axis-aligned box [0,width] x [0,height]. Integrable billiard.
struct Rectangle {
  double width = 1.0;
  double height = 1.0;
};

/// Stadium: flat walls y = +-cap_radius for x in [-length/2, length/2],
/// closed by semicircular caps centered at (+-length/2, 0). Chaotic.
struct BunimovichStadium {
  double length = 2.0;
  double cap_radius = 0.5;
};

/// Square [0,side]^2 with a central disk scatterer of radius disk_radius.
/// The disk is embedded as obstacle index 0 with an empty key ring.
struct SinaiSquare {
  double side = 1.0;
  double disk_radius = 0.1;
};

using ArenaShape = std::variant<Rectangle, BunimovichStadium, SinaiSquare>;

/// Fixed disk scatterer. Holds zero or more symmetric-key identifiers; the
/// ring is only consulted on collision.
struct Obstacle {
  int id = 0;
  Vec2 center;
  double radius = 0.0;
  std::vector<std::uint64_t> key_ring;

  bool holds_key(std::uint64_t key_id) const {
    return std::find(key_ring.begin(), key_ring.end(), key_id) != key_ring.end();
  }
};

enum class BallStatus : std::uint8_t { InFlight, Delivered };

/// Moving point particle. Carries a key identifier and an index into the
/// epoch's encrypted-payload store (-1 for bare kinematic balls).
struct Ball {
  int id = 0;
  Vec2 pos;
  Vec2 vel;
  std::uint64_t key_id = 0;
  std::int32_t payload_index = -1;
  BallStatus status = BallStatus::InFlight;

  double speed() const { return vel.norm(); }
};

/// Identity of the surface involved in a collision.
struct Surface {
  enum class Kind : std::uint8_t { Wall, Obstacle };
  Kind kind = Kind::Wall;
  int index = 0;

  friend constexpr auto operator<=>(const Surface&, const Surface&) = default;
};

struct CollisionEvent {
  double time = 0.0;
  int ball_id = 0;
  Surface surface;
  bool matched = false;
};

// ---------------------------------------------------------------------------
// Boundary pieces
// ---------------------------------------------------------------------------

/// Finite segment from a to b; inward_normal points into the free region.
struct WallSegment {
  Vec2 a, b;
  Vec2 inward_normal;
};

/// Circular arc; the free region lies inside the circle. Spans
/// counter-clockwise from angle_begin over angle_extent radians.
struct WallArc {
  Vec2 center;
  double radius = 0.0;
  double angle_begin = 0.0;
  double angle_extent = 0.0;

  bool covers_angle(double theta) const {
    const double two_pi = 2.0 * std::numbers::pi;
    double rel = std::fmod(theta - angle_begin, two_pi);
    if (rel < 0.0) rel += two_pi;
    return rel <= angle_extent + kSeamSlack || rel >= two_pi - kSeamSlack;
  }
};

using BoundaryPiece = std::variant<WallSegment, WallArc>;

/// Candidate impact found by the root solvers.
struct Impact {
  double t = 0.0;
  Surface surface;
  Vec2 point;
  Vec2 normal;  // unit, pointing into the free region
};

namespace detail {

/// Numerically stable roots of a2*t^2 + b*t + c = 0, ascending. Avoids the
/// cancellation-prone textbook form for small discriminants.
inline int solve_quadratic(double a2, double b, double c, double roots[2]) {
  const double disc = b * b - 4.0 * a2 * c;
  if (disc < 0.0 || a2 == 0.0) return 0;
  const double sq = std::sqrt(disc);
  const double q = -0.5 * (b + std::copysign(sq, b));
  double t0, t1;
  if (q == 0.0) {
    t0 = t1 = 0.0;
  } else {
    t0 = q / a2;
    t1 = c / q;
  }
  if (t0 > t1) std::swap(t0, t1);
  roots[0] = t0;
  roots[1] = t1;
  return 2;
}

inline std::optional<double> hit_segment(const Vec2& p, const Vec2& v,
                                         const WallSegment& seg) {
  const double approach = v.dot(seg.inward_normal);
  if (approach >= 0.0) return std::nullopt;  // moving away from the wall
  const double t = (seg.a - p).dot(seg.inward_normal) / approach;
  if (t <= kEventEpsilon) return std::nullopt;
  const Vec2 q = p + v * t;
  const Vec2 ab = seg.b - seg.a;
  const double len = ab.norm();
  const double s = (q - seg.a).dot(ab) * (1.0 / len);
  if (s < -kSeamSlack || s > len + kSeamSlack) return std::nullopt;
  return t;
}

/// First exit through a concave arc (ball travels inside the circle).
inline std::optional<double> hit_arc(const Vec2& p, const Vec2& v,
                                     const WallArc& arc) {
  const Vec2 d = p - arc.center;
  double roots[2];
  const int n =
      solve_quadratic(v.norm2(), 2.0 * d.dot(v), d.norm2() - arc.radius * arc.radius, roots);
  for (int i = 0; i < n; ++i) {
    const double t = roots[i];
    if (t <= kEventEpsilon) continue;
    const Vec2 q = p + v * t;
    if ((q - arc.center).dot(v) <= 0.0) continue;  // not moving outward there
    const double theta = std::atan2(q.y - arc.center.y, q.x - arc.center.x);
    if (!arc.covers_angle(theta)) continue;
    return t;
  }
  return std::nullopt;
}

/// First entry into a convex disk (ball travels outside the circle).
inline std::optional<double> hit_disk(const Vec2& p, const Vec2& v,
                                      const Vec2& center, double radius) {
  const Vec2 d = p - center;
  const double b = 2.0 * d.dot(v);
  if (b >= 0.0) return std::nullopt;  // receding from the disk
  double roots[2];
  const int n = solve_quadratic(v.norm2(), b, d.norm2() - radius * radius, roots);
  for (int i = 0; i < n; ++i) {
    const double t = roots[i];
    if (t <= kEventEpsilon) continue;
    if ((p + v * t - center).dot(v) >= 0.0) continue;  // exit root
    return t;
  }
  return std::nullopt;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Arena
// ---------------------------------------------------------------------------

struct BoundingBox {
  Vec2 lo, hi;
};

/// Immutable billiard domain: boundary walls plus disk obstacles. Owns the
/// analytically computed free area. Construction validates every geometric
/// invariant; after setup the value is safe to share read-only across
/// concurrent trials.
class Arena {
 public:
  /// Builds an arena, embedding the Sinai central disk (index 0, empty key
  /// ring) automatically; `extra_obstacles` are re-indexed after it.
  static Arena make(const ArenaShape& shape,
                    std::vector<Obstacle> extra_obstacles = {}) {
    std::vector<Obstacle> all;
    if (const auto* sinai = std::get_if<SinaiSquare>(&shape)) {
      all.push_back(Obstacle{0,
                             {sinai->side / 2.0, sinai->side / 2.0},
                             sinai->disk_radius,
                             {}});
    }
    for (auto& ob : extra_obstacles) all.push_back(std::move(ob));
    for (std::size_t i = 0; i < all.size(); ++i) all[i].id = static_cast<int>(i);
    return Arena(shape, std::move(all));
  }

  const ArenaShape& shape() const { return shape_; }
  const std::vector<BoundaryPiece>& walls() const { return walls_; }
  const std::vector<Obstacle>& obstacles() const { return obstacles_; }
  double free_area() const { return free_area_; }
  double boundary_area() const { return boundary_area_of(shape_); }

  static double boundary_area_of(const ArenaShape& shape) {
    return std::visit(
        [](const auto& s) -> double {
          using T = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<T, Rectangle>) {
            return s.width * s.height;
          } else if constexpr (std::is_same_v<T, BunimovichStadium>) {
            return s.length * 2.0 * s.cap_radius +
                   std::numbers::pi * s.cap_radius * s.cap_radius;
          } else {
            return s.side * s.side;
          }
        },
        shape);
  }

  /// Signed distance from p to the outer boundary; positive inside.
  double distance_to_boundary(const Vec2& p) const {
    return std::visit(
        [&](const auto& s) -> double {
          using T = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<T, Rectangle>) {
            return std::min(std::min(p.x, s.width - p.x),
                            std::min(p.y, s.height - p.y));
          } else if constexpr (std::is_same_v<T, BunimovichStadium>) {
            const Vec2 a{-s.length / 2.0, 0.0};
            const Vec2 b{s.length / 2.0, 0.0};
            return s.cap_radius - distance_to_segment(p, a, b);
          } else {
            return std::min(std::min(p.x, s.side - p.x),
                            std::min(p.y, s.side - p.y));
          }
        },
        shape_);
  }

  /// Inside the outer boundary with clearance >= margin.
  bool contains(const Vec2& p, double margin = 0.0) const {
    return distance_to_boundary(p) >= margin;
  }

  /// Inside the boundary and outside every obstacle, allowing `tol`
  /// penetration for floating-point noise.
  bool in_free_region(const Vec2& p, double tol = 0.0) const {
    if (distance_to_boundary(p) < -tol) return false;
    for (const auto& ob : obstacles_) {
      if ((p - ob.center).norm() < ob.radius - tol) return false;
    }
    return true;
  }

  BoundingBox bbox() const {
    return std::visit(
        [](const auto& s) -> BoundingBox {
          using T = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<T, Rectangle>) {
            return {{0.0, 0.0}, {s.width, s.height}};
          } else if constexpr (std::is_same_v<T, BunimovichStadium>) {
            const double hx = s.length / 2.0 + s.cap_radius;
            return {{-hx, -s.cap_radius}, {hx, s.cap_radius}};
          } else {
            return {{0.0, 0.0}, {s.side, s.side}};
          }
        },
        shape_);
  }

  /// Uniform point in the free region (rejection over the bounding box).
  /// Keeps a tiny clearance so trajectories never start on a surface.
  Vec2 sample_free_position(Rng& rng, double clearance = 1e-9) const {
    const BoundingBox box = bbox();
    for (;;) {
      const Vec2 p{rng.uniform(box.lo.x, box.hi.x), rng.uniform(box.lo.y, box.hi.y)};
      if (distance_to_boundary(p) < clearance) continue;
      bool clear = true;
      for (const auto& ob : obstacles_) {
        if ((p - ob.center).norm() < ob.radius + clearance) {
          clear = false;
          break;
        }
      }
      if (clear) return p;
    }
  }

  /// Human-readable wall label for logs ("right", "cap_left", ...).
  std::string wall_label(int index) const {
    const bool arcs = std::holds_alternative<BunimovichStadium>(shape_);
    static const char* rect_names[4] = {"left", "right", "bottom", "top"};
    static const char* stadium_names[4] = {"top", "bottom", "cap_right", "cap_left"};
    if (index < 0 || index >= 4) return "wall" + std::to_string(index);
    return arcs ? stadium_names[index] : rect_names[index];
  }

  /// Setup-phase mutation: install an obstacle's key ring. The arena is
  /// treated as immutable once balls are in motion.
  void set_key_ring(int obstacle_index, std::vector<std::uint64_t> ring) {
    obstacles_.at(static_cast<std::size_t>(obstacle_index)).key_ring = std::move(ring);
  }

 private:
  Arena(const ArenaShape& shape, std::vector<Obstacle> obstacles)
      : shape_(shape), obstacles_(std::move(obstacles)) {
    build_walls();
    validate();
    double occupied = 0.0;
    for (const auto& ob : obstacles_)
      occupied += std::numbers::pi * ob.radius * ob.radius;
    free_area_ = boundary_area_of(shape_) - occupied;
    if (!(free_area_ > 0.0)) throw Error("arena free area is not positive");
  }

  void build_walls() {
    std::visit(
        [&](const auto& s) {
          using T = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<T, Rectangle>) {
            add_box_walls(s.width, s.height);
          } else if constexpr (std::is_same_v<T, BunimovichStadium>) {
            const double hx = s.length / 2.0;
            const double r = s.cap_radius;
            walls_.push_back(WallSegment{{-hx, r}, {hx, r}, {0.0, -1.0}});
            walls_.push_back(WallSegment{{-hx, -r}, {hx, -r}, {0.0, 1.0}});
            walls_.push_back(WallArc{{hx, 0.0}, r, -std::numbers::pi / 2.0,
                                     std::numbers::pi});
            walls_.push_back(WallArc{{-hx, 0.0}, r, std::numbers::pi / 2.0,
                                     std::numbers::pi});
          } else {
            add_box_walls(s.side, s.side);
          }
        },
        shape_);
  }

  void add_box_walls(double w, double h) {
    walls_.push_back(WallSegment{{0.0, 0.0}, {0.0, h}, {1.0, 0.0}});   // left
    walls_.push_back(WallSegment{{w, 0.0}, {w, h}, {-1.0, 0.0}});      // right
    walls_.push_back(WallSegment{{0.0, 0.0}, {w, 0.0}, {0.0, 1.0}});   // bottom
    walls_.push_back(WallSegment{{0.0, h}, {w, h}, {0.0, -1.0}});      // top
  }

  void validate() const {
    std::visit(
        [](const auto& s) {
          using T = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<T, Rectangle>) {
            if (!(s.width > 0.0 && s.height > 0.0))
              throw Error("rectangle sides must be positive");
          } else if constexpr (std::is_same_v<T, BunimovichStadium>) {
            if (!(s.length > 0.0 && s.cap_radius > 0.0))
              throw Error("stadium dimensions must be positive");
          } else {
            if (!(s.side > 0.0 && s.disk_radius > 0.0 &&
                  s.disk_radius < s.side / 2.0))
              throw Error("sinai disk must be positive and fit inside the square");
          }
        },
        shape_);
    for (const auto& ob : obstacles_) {
      if (!(ob.radius > 0.0)) throw Error("obstacle radius must be positive");
      if (distance_to_boundary(ob.center) < ob.radius)
        throw Error("obstacle overlaps the boundary");
    }
    for (std::size_t i = 0; i < obstacles_.size(); ++i) {
      for (std::size_t j = i + 1; j < obstacles_.size(); ++j) {
        const double gap = (obstacles_[i].center - obstacles_[j].center).norm();
        if (gap < obstacles_[i].radius + obstacles_[j].radius)
          throw Error("obstacle disks overlap");
      }
    }
  }

  ArenaShape shape_;
  std::vector<BoundaryPiece> walls_;
  std::vector<Obstacle> obstacles_;
  double free_area_ = 0.0;
};

// ---------------------------------------------------------------------------
// Event solving
// ---------------------------------------------------------------------------

/// Earliest positive-time impact over all walls and obstacle disks, or
/// nullopt when nothing lies ahead (only possible for corrupt geometry).
///
/// Roots at t <= kEventEpsilon are discarded, and every candidate must be
/// approaching its surface at the impact point. Together these make the
/// surface just left invisible to the immediate next search while still
/// allowing consecutive hits on the same concave cap arc, which are
/// legitimate stadium orbits.
inline std::optional<Impact> try_next_event(const Ball& ball, const Arena& arena) {
  std::optional<Impact> best;
  auto consider = [&](double t, Surface surface) {
    if (best && (best->t < t ||
                 (best->t == t && best->surface <= surface)))
      return;
    Impact im;
    im.t = t;
    im.surface = surface;
    best = im;
  };

  const auto& walls = arena.walls();
  for (std::size_t i = 0; i < walls.size(); ++i) {
    const Surface surface{Surface::Kind::Wall, static_cast<int>(i)};
    if (const auto* seg = std::get_if<WallSegment>(&walls[i])) {
      if (auto t = detail::hit_segment(ball.pos, ball.vel, *seg)) consider(*t, surface);
    } else {
      const auto& arc = std::get<WallArc>(walls[i]);
      if (auto t = detail::hit_arc(ball.pos, ball.vel, arc)) consider(*t, surface);
    }
  }
  const auto& obstacles = arena.obstacles();
  for (std::size_t i = 0; i < obstacles.size(); ++i) {
    if (auto t = detail::hit_disk(ball.pos, ball.vel, obstacles[i].center,
                                  obstacles[i].radius))
      consider(*t, Surface{Surface::Kind::Obstacle, static_cast<int>(i)});
  }
  if (!best) return std::nullopt;

  // Resolve the impact point and inward unit normal, snapping the point back
  // onto the surface so long trajectories cannot accumulate penetration.
  Impact& im = *best;
  Vec2 q = ball.pos + ball.vel * im.t;
  if (im.surface.kind == Surface::Kind::Obstacle) {
    const auto& ob = arena.obstacles()[static_cast<std::size_t>(im.surface.index)];
    Vec2 radial = (q - ob.center).normalized();
    q = ob.center + radial * ob.radius;
    im.normal = radial;
  } else {
    const auto& piece = arena.walls()[static_cast<std::size_t>(im.surface.index)];
    if (const auto* seg = std::get_if<WallSegment>(&piece)) {
      q -= seg->inward_normal * (q - seg->a).dot(seg->inward_normal);
      im.normal = seg->inward_normal;
    } else {
      const auto& arc = std::get<WallArc>(piece);
      Vec2 radial = (q - arc.center).normalized();
      q = arc.center + radial * arc.radius;
      im.normal = -radial;
    }
  }
  im.point = q;
  return best;
}

/// Same as try_next_event but raises NoEventFound, matching the contract
/// that a closed arena always has a next collision.
inline Impact next_event(const Ball& ball, const Arena& arena) {
  auto im = try_next_event(ball, arena);
  if (!im)
    throw NoEventFound("no positive-time impact from (" +
                       std::to_string(ball.pos.x) + ", " +
                       std::to_string(ball.pos.y) + ") along (" +
                       std::to_string(ball.vel.x) + ", " +
                       std::to_string(ball.vel.y) + ")");
  return *im;
}

/// Free flight for dt. Throws EventSkipped if a collision lies strictly
/// inside (0, dt); an event exactly at dt is permitted.
inline Ball advance(const Ball& ball, double dt, const Arena& arena) {
  if (dt < 0.0) throw Error("advance: negative dt");
  if (dt > 0.0) {
    if (auto im = try_next_event(ball, arena); im && im->t < dt)
      throw EventSkipped("advance: collision at t=" + std::to_string(im->t) +
                         " inside requested dt=" + std::to_string(dt));
  }
  Ball out = ball;
  out.pos += ball.vel * dt;
  return out;
}

/// Advances the ball to its next collision, reflects it, and returns the
/// event stamped with the updated absolute time.
inline CollisionEvent step_to_next_event(Ball& ball, double& now,
                                         const Arena& arena) {
  const Impact im = next_event(ball, arena);
  ball.pos = im.point;
  ball.vel = reflect(ball.vel, im.normal);
  now += im.t;
  return CollisionEvent{now, ball.id, im.surface, false};
}

// ---------------------------------------------------------------------------
// Obstacle placement
// ---------------------------------------------------------------------------

/// Uniformly places `count` disjoint obstacle disks of radius `radius`
/// inside the shape (rejection sampling over admissible centers). The
/// attempt budget counts rejections across the whole call; exhausting it
/// raises PlacementInfeasible.
inline Arena place_obstacles(const ArenaShape& shape, int count, double radius,
                             Rng& rng, int attempt_budget = 100000) {
  if (count < 0) throw Error("place_obstacles: negative count");
  if (count > 0 && !(radius > 0.0))
    throw Error("place_obstacles: radius must be positive");

  // The Sinai central disk participates in the disjointness constraints.
  std::vector<Obstacle> fixed;
  if (const auto* sinai = std::get_if<SinaiSquare>(&shape)) {
    fixed.push_back(Obstacle{0,
                             {sinai->side / 2.0, sinai->side / 2.0},
                             sinai->disk_radius,
                             {}});
  }

  const Arena probe = Arena::make(shape);  // for bbox / boundary distance
  const BoundingBox box = probe.bbox();
  const double lo_x = box.lo.x + radius, hi_x = box.hi.x - radius;
  const double lo_y = box.lo.y + radius, hi_y = box.hi.y - radius;
  if (count > 0 && (lo_x >= hi_x || lo_y >= hi_y))
    throw PlacementInfeasible("obstacle radius exceeds arena half-extent");

  std::vector<Obstacle> placed;
  int rejections = 0;
  while (static_cast<int>(placed.size()) < count) {
    const Vec2 c{rng.uniform(lo_x, hi_x), rng.uniform(lo_y, hi_y)};
    bool ok = probe.distance_to_boundary(c) >= radius;
    for (const auto& ob : fixed) {
      if (!ok) break;
      ok = (c - ob.center).norm() >= radius + ob.radius;
    }
    for (const auto& ob : placed) {
      if (!ok) break;
      ok = (c - ob.center).norm() >= 2.0 * radius;
    }
    if (!ok) {
      if (++rejections >= attempt_budget)
        throw PlacementInfeasible("placement budget exhausted after " +
                                  std::to_string(rejections) + " rejections");
      continue;
    }
    placed.push_back(Obstacle{0, c, radius, {}});
  }
  return Arena::make(shape, std::move(placed));
}

}  // namespace dache
