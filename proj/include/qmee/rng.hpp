#pragma once

#include <array>
#include <cstdint>

namespace qmee {

/// Counter-based random stream (Philox4x64-10).
///
/// Fully specified so a sequence can be reproduced from (seed, stream) in any
/// language:
///   - key       = (seed, stream), two 64-bit words
///   - the b-th 256-bit block (b = 1, 2, ...) is Philox4x64-10 applied to
///     the little-endian counter value b under that key
///   - each block yields four 64-bit words, consumed in order
///   - next_double() = (word >> 11) * 2^-53, uniform in [0, 1)
///   - normal() uses Box-Muller on two consecutive uniforms, with the first
///     uniform mapped to (0, 1] as ((word >> 11) + 1) * 2^-53; the cosine
///     variate is returned first and the sine variate on the next call.
///
/// Distinct streams under the same seed are statistically independent, which
/// is how per-trial substreams are assigned throughout the library.
class Philox4x64 {
 public:
  explicit Philox4x64(std::uint64_t seed, std::uint64_t stream = 0) noexcept
      : key_{seed, stream} {}

  std::uint64_t next_u64() noexcept;

  /// Uniform double in [0, 1).
  double next_double() noexcept {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) noexcept {
    return lo + (hi - lo) * next_double();
  }

  /// Gaussian variate via Box-Muller; the second variate of each pair is
  /// cached and returned by the following call.
  double normal(double mean = 0.0, double stddev = 1.0) noexcept;

  bool bernoulli(double p) noexcept { return next_double() < p; }

  /// Unbiased integer in [0, bound) via rejection sampling. bound >= 1.
  std::uint64_t next_below(std::uint64_t bound) noexcept;

  std::uint64_t seed() const noexcept { return key_[0]; }
  std::uint64_t stream() const noexcept { return key_[1]; }

 private:
  void refill() noexcept;

  std::array<std::uint64_t, 2> key_;
  std::array<std::uint64_t, 4> counter_{0, 0, 0, 0};
  std::array<std::uint64_t, 4> block_{};
  int pos_ = 4;  // forces a refill on the first draw
  double pending_normal_ = 0.0;
  bool has_pending_normal_ = false;
};

}  // namespace qmee
