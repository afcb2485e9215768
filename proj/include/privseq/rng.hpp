// Copyright 2026 The privseq Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <array>
#include <cstdint>

namespace privseq {

/// Deterministic counter-seeded generator (xoshiro256++ seeded via splitmix64).
///
/// Identical (seed, stream) pairs produce bit-identical draw sequences on every
/// platform; the standard library engines make no such guarantee for the
/// distributions layered on top, so the uniform transforms live here too.
/// Instances are cheap value types but are single-owner by convention: one per
/// replication, never shared across threads.
class SeededRng {
 public:
  SeededRng(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t next_u64();

  /// Uniform double in [0, 1), 53-bit resolution.
  double uniform01();

  /// Uniform double in the open interval (0, 1); safe to pass through log().
  double uniform01_open();

  /// Uniform integer in [0, n); n must be positive.
  std::uint64_t uniform_below(std::uint64_t n);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

 private:
  std::array<std::uint64_t, 4> state_;
  std::uint64_t seed_;
  std::uint64_t stream_;
};

}  // namespace privseq
