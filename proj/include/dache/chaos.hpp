// SPDX-FileCopyrightText: 2026 The dache authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "dache/geometry.hpp"
#include "dache/rng.hpp"

namespace dache {

struct LyapunovEstimate {
  double lambda_hat = 0.0;       // mean of per-window divergence rates, 1/time
  double horizon = 0.0;          // total simulated time
  int renormalization_count = 0;
  std::vector<double> per_window_rates;
};

struct LyapunovParams {
  double delta0 = 1e-9;     // renormalization target separation
  double delta_max = 1e-3;  // safety threshold: renormalize immediately above this
  /// Longest allowed window. Integrable arenas (sub-exponential divergence)
  /// never reach delta_max, so this cadence keeps rate windows coming
  /// instead of starving the estimator.
  double forced_window = 500.0;
  /// Measurement windows target this many e-folds of growth; the window
  /// length is set from a short warmup estimate. Equal-length windows make
  /// the mean of per-window rates agree with total log-growth over total
  /// time, which a threshold-driven schedule would not (short bursty
  /// windows overweight high-rate stretches).
  double window_growth = 4.0;
  int warmup_windows = 8;
  int min_renormalizations = 10;
};

struct MeanFreeTime {
  double tau_hat = 0.0;       // empirical mean gap between obstacle hits
  std::size_t sample_count = 0;
  double tau_predicted = 0.0;  // A_free / (2 r n |v|)
};

namespace detail {

/// Separation is measured in position space: it is continuous across
/// reflections, whereas a velocity-difference norm spikes by O(|v|) in the
/// sliver of time where one ball of the pair has bounced and the other has
/// not yet.
inline double pair_separation(const Ball& a, const Ball& b) {
  return (b.pos - a.pos).norm();
}

/// Pulls the twin back to position separation delta0 along the current
/// difference direction, shrinking the velocity difference by the same
/// factor, then restores the twin to the reference speed shell.
inline void renormalize_twin(const Ball& ref, Ball& twin, double delta0) {
  const Vec2 dx = twin.pos - ref.pos;
  const Vec2 dv = twin.vel - ref.vel;
  const double f = delta0 / dx.norm();
  twin.pos = ref.pos + dx * f;
  twin.vel = ref.vel + dv * f;
  const double speed = ref.vel.norm();
  twin.vel *= speed / twin.vel.norm();
}

}  // namespace detail

/// Largest Lyapunov exponent via a reference trajectory and a perturbed twin.
///
/// The perturbation splits delta0 evenly between a transverse position
/// offset and a velocity rotation. Whenever the phase-space separation
/// exceeds delta_max — or the forced cadence elapses — the rate
/// ln(sep/delta0)/elapsed is recorded and the twin is pulled back to delta0
/// along the separation direction. Paired trajectories are used instead of
/// tangent-space Jacobians, which keeps the method uniform across segment,
/// arc and disk boundaries.
///
/// Throws HorizonTooShort when fewer than min_renormalizations windows fit.
inline LyapunovEstimate estimate_lyapunov(const Arena& arena, const Ball& initial,
                                          double horizon, Rng& rng,
                                          const LyapunovParams& params = {}) {
  if (!(params.delta0 > 0.0) || !(params.delta_max > params.delta0))
    throw Error("estimate_lyapunov: need 0 < delta0 < delta_max");
  if (!(horizon > 0.0)) throw Error("estimate_lyapunov: horizon must be positive");
  if (!(initial.speed() > 0.0)) throw Error("estimate_lyapunov: ball at rest");

  Ball ref = initial;
  Ball twin = initial;
  {
    const Vec2 transverse = ref.vel.normalized().perp();
    const double sign_x = rng.bernoulli(0.5) ? 1.0 : -1.0;
    const double sign_v = rng.bernoulli(0.5) ? 1.0 : -1.0;
    twin.pos += transverse * (params.delta0 * sign_x);
    twin.vel = ref.vel.rotated(sign_v * params.delta0 / ref.speed());
  }

  double t_ref = 0.0, t_twin = 0.0;  // time stamps of the stored states
  double now = 0.0;
  double window_start = 0.0;
  Impact ev_ref = next_event(ref, arena);
  Impact ev_twin = next_event(twin, arena);

  // Renormalizing while either ball sits within the event-epsilon shell of a
  // surface would leave a state the solver treats as already departed, so a
  // requested renormalization waits until both flights have this much time
  // clearance before their next impact.
  constexpr double kRenormClearance = 1e-9;

  bool warming_up = params.warmup_windows > 0;
  int warmup_left = params.warmup_windows;
  double warmup_log = 0.0, warmup_time = 0.0;
  double window = params.forced_window;
  double deadline = window;

  std::vector<double> rates;
  bool renorm_pending = false;

  const auto sync_to = [&](double t) {
    ref.pos += ref.vel * (t - t_ref);
    twin.pos += twin.vel * (t - t_twin);
    t_ref = t_twin = t;
  };
  const auto record_and_renormalize = [&]() {
    const double sep = detail::pair_separation(ref, twin);
    if (now > window_start && sep > 0.0) {
      const double log_growth = std::log(sep / params.delta0);
      if (warming_up) {
        warmup_log += log_growth;
        warmup_time += now - window_start;
        if (--warmup_left == 0) {
          warming_up = false;
          const double pilot = warmup_log / warmup_time;
          if (std::isfinite(pilot) && pilot > params.window_growth / params.forced_window)
            window = std::max(params.window_growth / pilot, 0.25);
        }
      } else {
        rates.push_back(log_growth / (now - window_start));
      }
    }
    if (sep > 0.0) {
      detail::renormalize_twin(ref, twin, params.delta0);
    } else {  // exact trajectory crossing: re-seed the perturbation
      twin.pos = ref.pos + ref.vel.normalized().perp() * params.delta0;
      twin.vel = ref.vel;
    }
    window_start = now;
    deadline = now + window;
    ev_ref = next_event(ref, arena);
    ev_twin = next_event(twin, arena);
  };

  while (now < horizon) {
    const double te_ref = t_ref + ev_ref.t;
    const double te_twin = t_twin + ev_twin.t;
    const double te = std::min(te_ref, te_twin);

    if (!renorm_pending && deadline <= now) renorm_pending = true;
    if (renorm_pending) {
      if (te - now > kRenormClearance) {
        sync_to(now);
        record_and_renormalize();
        renorm_pending = false;
        continue;
      }
      // An impact is imminent; fall through, process it, and retry.
    } else if (deadline < te) {
      now = deadline;  // window boundary lies inside both flights
      continue;
    }

    now = te;
    if (te_ref <= te_twin) {
      ref.pos = ev_ref.point;
      ref.vel = reflect(ref.vel, ev_ref.normal);
      t_ref = now;
      ev_ref = next_event(ref, arena);
    } else {
      twin.pos = ev_twin.point;
      twin.vel = reflect(twin.vel, ev_twin.normal);
      t_twin = now;
      ev_twin = next_event(twin, arena);
    }

    // Safety threshold, checked with both states extrapolated to `now`.
    const Vec2 dx = (twin.pos + twin.vel * (now - t_twin)) -
                    (ref.pos + ref.vel * (now - t_ref));
    if (dx.norm() >= params.delta_max) renorm_pending = true;
  }

  if (static_cast<int>(rates.size()) < params.min_renormalizations)
    throw HorizonTooShort("lyapunov: only " + std::to_string(rates.size()) +
                          " measurement windows in horizon " + std::to_string(horizon));

  double sum = 0.0;
  for (double r : rates) sum += r;
  LyapunovEstimate out;
  out.lambda_hat = sum / static_cast<double>(rates.size());
  out.horizon = now;
  out.renormalization_count = static_cast<int>(rates.size());
  out.per_window_rates = std::move(rates);
  return out;
}

/// Convenience overload sampling a uniform random start at unit speed.
inline LyapunovEstimate estimate_lyapunov(const Arena& arena, double horizon,
                                          Rng& rng,
                                          const LyapunovParams& params = {},
                                          double speed = 1.0) {
  Ball b;
  b.pos = arena.sample_free_position(rng, 1e-6);
  b.vel = rng.unit_vector() * speed;
  return estimate_lyapunov(arena, b, horizon, rng, params);
}

/// Empirical mean time between successive obstacle hits along one long
/// trajectory, against the prediction A_free / (2 r n |v|). Wall hits do not
/// count. Requires at least one obstacle, all of equal radius.
inline MeanFreeTime measure_mean_free_time(const Arena& arena, std::size_t trials,
                                           Rng& rng, double speed = 1.0) {
  const auto& obstacles = arena.obstacles();
  if (obstacles.empty()) throw NoObstacles("mean free time needs >= 1 obstacle");
  const double r = obstacles.front().radius;
  for (const auto& ob : obstacles) {
    if (std::fabs(ob.radius - r) > 1e-12 * r)
      throw Error("mean free time: obstacles must share one radius");
  }
  if (trials < 1) throw InsufficientSample("mean free time: trials < 1");

  Ball ball;
  ball.pos = arena.sample_free_position(rng);
  ball.vel = rng.unit_vector() * speed;

  double now = 0.0;
  double last_hit = -1.0;
  double gap_sum = 0.0;
  std::size_t gaps = 0;
  while (gaps < trials) {
    const CollisionEvent ev = step_to_next_event(ball, now, arena);
    if (ev.surface.kind != Surface::Kind::Obstacle) continue;
    if (last_hit >= 0.0) {
      gap_sum += ev.time - last_hit;
      ++gaps;
    }
    last_hit = ev.time;
  }

  MeanFreeTime out;
  out.tau_hat = gap_sum / static_cast<double>(gaps);
  out.sample_count = gaps;
  out.tau_predicted =
      arena.free_area() /
      (2.0 * r * static_cast<double>(obstacles.size()) * speed);
  return out;
}

/// Right-hand side of the Sinai entropy relation, -2 ln R.
inline double ks_entropy_rhs(double disk_radius) { return -2.0 * std::log(disk_radius); }

struct KsEntropyReport {
  double lhs = 0.0;  // tau_hat * lambda_hat
  double rhs = 0.0;  // -2 ln R
  double relative_gap = 0.0;
  MeanFreeTime tau;
  LyapunovEstimate lyapunov;
};

struct KsEntropyParams {
  std::size_t tau_trials = 20000;
  double speed = 1.0;
  LyapunovParams lyapunov;
};

/// Checks tau * h = -2 ln R on a unit Sinai square, with h taken as the
/// single positive Lyapunov exponent. Valid in the small-radius regime
/// (R < side/4); the relation is asymptotic, so callers should treat the
/// gap as a diagnostic rather than an exact identity.
inline KsEntropyReport ks_entropy_relation(const Arena& arena, double horizon,
                                           Rng& rng,
                                           const KsEntropyParams& params = {}) {
  const auto* sinai = std::get_if<SinaiSquare>(&arena.shape());
  if (sinai == nullptr) throw Error("ks_entropy_relation: arena must be a Sinai square");
  if (std::fabs(sinai->side - 1.0) > 1e-12)
    throw Error("ks_entropy_relation: stated for the unit square normalization");
  if (!(sinai->disk_radius > 0.0 && sinai->disk_radius < 0.25 * sinai->side))
    throw Error("ks_entropy_relation: requires 0 < R < side/4");

  KsEntropyReport report;
  report.tau = measure_mean_free_time(arena, params.tau_trials, rng, params.speed);
  report.lyapunov =
      estimate_lyapunov(arena, horizon, rng, params.lyapunov, params.speed);
  report.lhs = report.tau.tau_hat * report.lyapunov.lambda_hat;
  report.rhs = ks_entropy_rhs(sinai->disk_radius);
  report.relative_gap = std::fabs(report.lhs - report.rhs) / report.rhs;
  return report;
}

}  // namespace dache
