// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>

namespace spreadcert {

/// SplitMix64 with an explicit stream id. Output is a pure function of
/// (seed, stream), identical on every platform, which std:: distributions
/// do not guarantee.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed, std::uint64_t stream = 0) noexcept;

  std::uint64_t next() noexcept;

  /// Uniform in [0, 1) with 53 bits of mantissa.
  double uniform() noexcept;

  /// Uniform integer in [0, bound); bound must be > 0.
  std::uint64_t below(std::uint64_t bound) noexcept;

  /// Standard normal via Box-Muller (no cached second deviate).
  double normal() noexcept;

  /// Independent generator for a sub-stream.
  SplitMix64 split(std::uint64_t stream) const noexcept;

 private:
  std::uint64_t seed_;
  std::uint64_t state_;
};

}  // namespace spreadcert
