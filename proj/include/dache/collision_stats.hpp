// SPDX-FileCopyrightText: 2026 The dache authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "dache/geometry.hpp"
#include "dache/rng.hpp"
#include "dache/stats.hpp"

namespace dache {

struct CollisionConfig {
  double radius = 0.0;       // target disk radius
  std::size_t n_disks = 0;   // obstacles present in the arena
  double speed = 1.0;
  double area = 0.0;         // free area
};

/// First-collision times onto one marked target disk, one entry per
/// completed trial. Timed-out trials are counted, never silently dropped.
struct CollisionSample {
  std::vector<double> times;
  CollisionConfig config;
  double lambda_predicted = 0.0;  // 2 r |v| / A for the target disk
  std::size_t trials = 0;
  std::size_t censored = 0;
  double t_cap = 0.0;

  double censored_fraction() const {
    return trials == 0 ? 0.0
                       : static_cast<double>(censored) / static_cast<double>(trials);
  }
};

struct FitReport {
  double lambda_hat = 0.0;
  double ks_statistic = 0.0;
  double ks_critical = 0.0;
  bool passed = false;  // ks_statistic < ks_critical
  std::size_t sample_count = 0;
};

/// Runs `trials` independent balls from uniform free positions and uniform
/// directions until each first hits the marked disk, recording the elapsed
/// time. A trial whose simulated time passes t_cap is censored. A
/// target_index that matches no obstacle never hits, so every trial censors
/// (the degenerate removed-target case).
inline CollisionSample sample_first_collision(const Arena& arena, int target_index,
                                              std::size_t trials, Rng& rng,
                                              double speed = 1.0,
                                              double t_cap = 1000.0) {
  if (!(speed > 0.0)) throw Error("sample_first_collision: speed must be positive");
  CollisionSample out;
  out.trials = trials;
  out.t_cap = t_cap;
  const auto& obstacles = arena.obstacles();
  const bool target_exists =
      target_index >= 0 && target_index < static_cast<int>(obstacles.size());
  const double r = target_exists
                       ? obstacles[static_cast<std::size_t>(target_index)].radius
                       : 0.0;
  out.config = {r, obstacles.size(), speed, arena.free_area()};
  out.lambda_predicted = 2.0 * r * speed / arena.free_area();

  for (std::size_t trial = 0; trial < trials; ++trial) {
    Ball ball;
    ball.pos = arena.sample_free_position(rng);
    ball.vel = rng.unit_vector() * speed;
    double now = 0.0;
    bool hit = false;
    while (now <= t_cap) {
      const CollisionEvent ev = step_to_next_event(ball, now, arena);
      if (now > t_cap) break;
      if (target_exists && ev.surface.kind == Surface::Kind::Obstacle &&
          ev.surface.index == target_index) {
        out.times.push_back(now);
        hit = true;
        break;
      }
    }
    if (!hit) ++out.censored;
  }
  return out;
}

/// Maximum-likelihood exponential fit (lambda = 1/mean) plus a one-sample
/// KS test against the fitted law. The critical value carries the 0.886
/// estimated-parameter correction.
inline FitReport fit_exponential(const CollisionSample& sample,
                                 std::size_t min_completed = 1000) {
  const std::size_t n = sample.times.size();
  if (n < min_completed)
    throw InsufficientSample("fit_exponential: " + std::to_string(n) +
                             " completed trials, need " +
                             std::to_string(min_completed));
  const double lambda = 1.0 / mean_of(sample.times);
  FitReport report;
  report.lambda_hat = lambda;
  report.sample_count = n;
  report.ks_statistic = ks_statistic(
      sample.times, [lambda](double t) { return exponential_cdf(lambda, t); });
  report.ks_critical = ks_critical(n, /*estimated_parameter=*/true);
  report.passed = report.ks_statistic < report.ks_critical;
  return report;
}

/// P(all n independent balls have hit their matched disks by time t)
/// = (1 - e^{-lambda t})^n.
inline double all_collide_cdf(double lambda, int n, double t) {
  if (!(lambda > 0.0) || n < 1) throw Error("all_collide_cdf: need lambda > 0, n >= 1");
  if (t <= 0.0) return 0.0;
  return std::pow(-std::expm1(-lambda * t), n);
}

/// Density of the all-collide time, n lambda e^{-lambda t}(1-e^{-lambda t})^{n-1}.
inline double all_collide_pdf(double lambda, int n, double t) {
  if (!(lambda > 0.0) || n < 1) throw Error("all_collide_pdf: need lambda > 0, n >= 1");
  if (t < 0.0) return 0.0;
  return n * lambda * std::exp(-lambda * t) *
         std::pow(-std::expm1(-lambda * t), n - 1);
}

struct GeometricLimitReport {
  ChiSquareResult chi_square;  // first-success step vs the geometric law
  FitReport exponential_fit;   // jittered steps vs Exp(p), the continuous limit
  std::size_t trials = 0;
};

/// Simulates Bernoulli(p) step sequences and validates both halves of the
/// discrete-to-continuous argument: the first-success step follows the
/// geometric law (chi-square), and for small p the rescaled first-success
/// time converges to Exp(p) (KS). Steps are jittered uniformly within their
/// unit interval before the KS comparison so the staircase itself is not
/// mistaken for lack of fit; for large p the remaining gap is real and the
/// KS check fails, which is the point of the small-p hypothesis.
inline GeometricLimitReport geometric_limit_check(double p, std::size_t trials,
                                                  Rng& rng,
                                                  std::size_t max_steps = 1000000) {
  if (!(p > 0.0 && p < 1.0)) throw Error("geometric_limit_check: need 0 < p < 1");
  if (trials < 1000) throw InsufficientSample("geometric_limit_check: trials < 1000");

  std::vector<std::uint64_t> steps;
  steps.reserve(trials);
  for (std::size_t i = 0; i < trials; ++i) {
    std::uint64_t s = 1;
    while (!rng.bernoulli(p) && s < max_steps) ++s;
    steps.push_back(s);
  }

  // Chi-square against geometric bin masses, merging the tail so every
  // expected count stays well above the usual validity floor.
  const double n = static_cast<double>(trials);
  std::vector<double> observed, expected;
  double tail_mass = 1.0;
  std::uint64_t k = 1;
  while (tail_mass * n * p >= 10.0 && observed.size() < 500) {
    const double mass = std::pow(1.0 - p, static_cast<double>(k - 1)) * p;
    double count = 0.0;
    for (auto s : steps) count += (s == k) ? 1.0 : 0.0;
    observed.push_back(count);
    expected.push_back(mass * n);
    tail_mass -= mass;
    ++k;
  }
  double tail_count = 0.0;
  for (auto s : steps) tail_count += (s >= k) ? 1.0 : 0.0;
  observed.push_back(tail_count);
  expected.push_back(tail_mass * n);

  GeometricLimitReport report;
  report.trials = trials;
  report.chi_square = chi_square_test(observed, expected);

  std::vector<double> jittered;
  jittered.reserve(trials);
  for (auto s : steps)
    jittered.push_back(static_cast<double>(s - 1) + rng.uniform());
  FitReport& fit = report.exponential_fit;
  fit.lambda_hat = p;  // tested rate is known, not estimated
  fit.sample_count = trials;
  fit.ks_statistic =
      ks_statistic(jittered, [p](double t) { return exponential_cdf(p, t); });
  fit.ks_critical = ks_critical(trials, /*estimated_parameter=*/false);
  fit.passed = fit.ks_statistic < fit.ks_critical;
  return report;
}

}  // namespace dache
