// SPDX-FileCopyrightText: 2026 The dache authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

#include "dache/errors.hpp"

namespace dache {

// ---------------------------------------------------------------------------
// Exact summation
// ---------------------------------------------------------------------------

/// Exact accumulator for doubles: a fixed-point superaccumulator spanning the
/// full double range (radix 2^32 limbs), with positive and negative inputs
/// kept in separate magnitude accumulators.
///
/// Adding and merging are exactly associative and commutative, so any
/// grouping of the same addends — per-shard partials merged in any order, or
/// a single direct pass — produces the identical limb state and therefore an
/// identical rounded double. This is what makes float aggregates of the
/// sharded path bit-equal to the unsharded oracle.
class ExactSum {
 public:
  void add(double x) {
    if (x == 0.0) return;
    if (!std::isfinite(x)) throw Error("ExactSum: non-finite addend");
    const bool neg = std::signbit(x);
    int exp = 0;
    const double m = std::frexp(std::fabs(x), &exp);
    const auto mantissa = static_cast<std::uint64_t>(m * 0x1p53);  // exact
    add_mantissa(neg ? neg_ : pos_, mantissa, exp - 53 + kBias);
    if (++adds_ >= kNormalizeEvery) normalize();
  }

  void merge(const ExactSum& other) {
    for (int i = 0; i < kLimbs; ++i) {
      pos_[i] += other.pos_[i];
      neg_[i] += other.neg_[i];
    }
    adds_ += other.adds_;
    if (adds_ >= kNormalizeEvery) normalize();
  }

  /// Deterministic rounding of the exact total. The positive and negative
  /// accumulators are subtracted exactly in the limb domain, so cancellation
  /// costs nothing; only the final conversion rounds.
  double to_double() const {
    ExactSum copy = *this;
    copy.normalize();
    int cmp = 0;
    for (int i = kLimbs - 1; i >= 0 && cmp == 0; --i) {
      if (copy.pos_[i] != copy.neg_[i]) cmp = copy.pos_[i] > copy.neg_[i] ? 1 : -1;
    }
    if (cmp == 0) return 0.0;
    const std::uint64_t* big = cmp > 0 ? copy.pos_ : copy.neg_;
    const std::uint64_t* small = cmp > 0 ? copy.neg_ : copy.pos_;
    std::uint64_t mag[kLimbs];
    std::uint64_t borrow = 0;
    for (int i = 0; i < kLimbs; ++i) {
      const std::uint64_t need = small[i] + borrow;
      if (big[i] >= need) {
        mag[i] = big[i] - need;
        borrow = 0;
      } else {
        mag[i] = big[i] + 0x100000000ULL - need;
        borrow = 1;
      }
    }
    const long double total = value_of(mag);
    return static_cast<double>(cmp > 0 ? total : -total);
  }

  /// Canonical-form comparison: equal iff the exact positive and negative
  /// totals are equal.
  friend bool operator==(const ExactSum& a, const ExactSum& b) {
    ExactSum ca = a, cb = b;
    ca.normalize();
    cb.normalize();
    for (int i = 0; i < kLimbs; ++i) {
      if (ca.pos_[i] != cb.pos_[i] || ca.neg_[i] != cb.neg_[i]) return false;
    }
    return true;
  }

 private:
  static constexpr int kLimbs = 68;            // 68 * 32 bits covers all doubles
  static constexpr int kBias = 1152;           // shifts the smallest denormal to bit 0
  static constexpr std::uint64_t kNormalizeEvery = 1ULL << 30;

  static void add_mantissa(std::uint64_t* limbs, std::uint64_t mantissa,
                           int bit_offset) {
    const int limb = bit_offset >> 5;
    const int shift = bit_offset & 31;
    const unsigned __int128 wide = static_cast<unsigned __int128>(mantissa) << shift;
    limbs[limb] += static_cast<std::uint32_t>(wide);
    limbs[limb + 1] += static_cast<std::uint32_t>(wide >> 32);
    limbs[limb + 2] += static_cast<std::uint32_t>(wide >> 64);
  }

  void normalize() {
    std::uint64_t carry_p = 0, carry_n = 0;
    for (int i = 0; i < kLimbs; ++i) {
      pos_[i] += carry_p;
      neg_[i] += carry_n;
      carry_p = pos_[i] >> 32;
      carry_n = neg_[i] >> 32;
      pos_[i] &= 0xffffffffULL;
      neg_[i] &= 0xffffffffULL;
    }
    adds_ = 0;
  }

  static long double value_of(const std::uint64_t* limbs) {
    long double acc = 0.0L;
    for (int i = kLimbs - 1; i >= 0; --i) {
      if (limbs[i] == 0) continue;
      acc += std::ldexp(static_cast<long double>(limbs[i]), 32 * i - kBias);
    }
    return acc;
  }

  std::uint64_t pos_[kLimbs] = {};
  std::uint64_t neg_[kLimbs] = {};
  std::uint64_t adds_ = 0;
};

// ---------------------------------------------------------------------------
// Sample summaries and hypothesis tests
// ---------------------------------------------------------------------------

inline double mean_of(std::span<const double> xs) {
  if (xs.empty()) throw InsufficientSample("mean of empty sample");
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

/// One-sample Kolmogorov-Smirnov statistic against a continuous CDF.
inline double ks_statistic(std::vector<double> samples,
                           const std::function<double(double)>& cdf) {
  if (samples.empty()) throw InsufficientSample("KS on empty sample");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    const double hi = (static_cast<double>(i) + 1.0) / n - f;
    const double lo = f - static_cast<double>(i) / n;
    d = std::max(d, std::max(hi, lo));
  }
  return d;
}

/// 5%-level KS critical value, 1.358/sqrt(N); multiplied by the standard
/// 0.886 correction when the distribution parameter was estimated from the
/// same sample.
inline double ks_critical(std::size_t n, bool estimated_parameter) {
  const double base = 1.358 / std::sqrt(static_cast<double>(n));
  return estimated_parameter ? 0.886 * base : base;
}

struct ChiSquareResult {
  double statistic = 0.0;
  std::size_t dof = 0;
  double p_value = 1.0;

  bool passed(double alpha = 0.05) const { return p_value >= alpha; }
};

/// Pearson chi-square against given expected counts. dof defaults to
/// bins - 1 - params_estimated.
inline ChiSquareResult chi_square_test(std::span<const double> observed,
                                       std::span<const double> expected,
                                       std::size_t params_estimated = 0) {
  if (observed.size() != expected.size() || observed.size() < 2)
    throw Error("chi_square_test: bin count mismatch");
  double stat = 0.0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    if (expected[i] <= 0.0) throw Error("chi_square_test: nonpositive expected bin");
    const double d = observed[i] - expected[i];
    stat += d * d / expected[i];
  }
  const std::size_t dof = observed.size() - 1 - params_estimated;
  boost::math::chi_squared dist(static_cast<double>(dof));
  const double p = boost::math::cdf(boost::math::complement(dist, stat));
  return {stat, dof, p};
}

inline double exponential_cdf(double lambda, double t) {
  return t <= 0.0 ? 0.0 : -std::expm1(-lambda * t);
}

}  // namespace dache
