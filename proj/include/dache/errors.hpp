// SPDX-FileCopyrightText: 2026 The dache authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace dache {

/// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// --- billiard dynamics -------------------------------------------------

/// No positive-time impact exists. Impossible in a closed arena; raised as a
/// fatal invariant violation when the geometry state is corrupt.
struct NoEventFound : Error {
  using Error::Error;
};

/// advance() was asked to jump over a collision event.
struct EventSkipped : Error {
  using Error::Error;
};

/// Rejection sampling exhausted its attempt budget while placing obstacles.
struct PlacementInfeasible : Error {
  using Error::Error;
};

// --- chaos / statistics -------------------------------------------------

/// Lyapunov horizon produced fewer than the minimum number of
/// renormalization windows.
struct HorizonTooShort : Error {
  using Error::Error;
};

struct NoObstacles : Error {
  using Error::Error;
};

struct InsufficientSample : Error {
  using Error::Error;
};

// --- sharding / crypto --------------------------------------------------

struct InvalidShardCount : Error {
  using Error::Error;
};

struct NotEnoughBalls : Error {
  using Error::Error;
};

struct SerializationFailure : Error {
  using Error::Error;
};

/// Authenticated decryption failed: wrong key or tampered ciphertext.
/// No plaintext is ever produced on this path.
struct AuthenticationFailure : Error {
  using Error::Error;
};

// --- query engine -------------------------------------------------------

struct TypeMismatch : Error {
  using Error::Error;
};

struct PlanValidationError : Error {
  using Error::Error;
};

struct MissingShard : Error {
  using Error::Error;
};

struct DuplicateShard : Error {
  using Error::Error;
};

// --- orchestrator -------------------------------------------------------

/// The registry claimed a key match but authenticated decryption failed.
/// Integrity of the epoch state is broken; callers must abort the epoch.
struct AuthFailureOnClaimedMatch : Error {
  using Error::Error;
};

/// Simulated time exceeded the T_max policy before all shards arrived.
struct ConvergenceTimeout : Error {
  ConvergenceTimeout(std::string msg, std::vector<std::uint32_t> delivered_ids,
                     std::vector<std::uint32_t> undelivered_ids)
      : Error(std::move(msg)),
        delivered(std::move(delivered_ids)),
        undelivered(std::move(undelivered_ids)) {}

  std::vector<std::uint32_t> delivered;
  std::vector<std::uint32_t> undelivered;
};

struct ConfigError : Error {
  using Error::Error;
};

}  // namespace dache
