#include "qmee/rng.hpp"

#include <cmath>

namespace qmee {
namespace {

constexpr std::uint64_t kMult0 = 0xD2E7470EE14C6C93ULL;
constexpr std::uint64_t kMult1 = 0xCA5A826395121157ULL;
constexpr std::uint64_t kWeyl0 = 0x9E3779B97F4A7C15ULL;
constexpr std::uint64_t kWeyl1 = 0xBB67AE8584CAA73BULL;

inline std::uint64_t mulhi64(std::uint64_t a, std::uint64_t b) noexcept {
  return static_cast<std::uint64_t>(
      (static_cast<unsigned __int128>(a) * b) >> 64);
}

inline void philox_round(std::array<std::uint64_t, 4>& s,
                         const std::array<std::uint64_t, 2>& k) noexcept {
  const std::uint64_t hi0 = mulhi64(s[0], kMult0);
  const std::uint64_t lo0 = s[0] * kMult0;
  const std::uint64_t hi1 = mulhi64(s[2], kMult1);
  const std::uint64_t lo1 = s[2] * kMult1;
  s = {hi1 ^ s[1] ^ k[0], lo1, hi0 ^ s[3] ^ k[1], lo0};
}

}  // namespace

void Philox4x64::refill() noexcept {
  // 256-bit little-endian counter increment; the b-th emitted block
  // (b = 1, 2, ...) is the Philox output for counter value b.
  for (auto& word : counter_) {
    if (++word != 0) break;
  }
  std::array<std::uint64_t, 4> s = counter_;
  std::array<std::uint64_t, 2> k = key_;
  philox_round(s, k);
  for (int r = 1; r < 10; ++r) {
    k[0] += kWeyl0;
    k[1] += kWeyl1;
    philox_round(s, k);
  }
  block_ = s;
  pos_ = 0;
}

std::uint64_t Philox4x64::next_u64() noexcept {
  if (pos_ == 4) refill();
  return block_[pos_++];
}

double Philox4x64::normal(double mean, double stddev) noexcept {
  if (has_pending_normal_) {
    has_pending_normal_ = false;
    return mean + stddev * pending_normal_;
  }
  const double u1 = static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  const double u2 = next_double();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 6.283185307179586476925286766559 * u2;
  pending_normal_ = radius * std::sin(angle);
  has_pending_normal_ = true;
  return mean + stddev * radius * std::cos(angle);
}

std::uint64_t Philox4x64::next_below(std::uint64_t bound) noexcept {
  const std::uint64_t limit = bound * (~std::uint64_t{0} / bound);
  std::uint64_t draw;
  do {
    draw = next_u64();
  } while (draw >= limit);
  return draw % bound;
}

}  // namespace qmee
