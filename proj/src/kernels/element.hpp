#pragma once

// Per-element math shared by the scalar pass and the AVX2 tail loop. Every
// translation unit including this header is compiled with -ffp-contract=off;
// all fused operations are spelled out with std::fma so the vector backends
// can mirror the exact operation sequence lane for lane.

#include <bit>
#include <cmath>
#include <cstdint>

namespace qmee::kernels::detail {

// Exponent arguments below this return exactly 0 (library-wide underflow rule).
inline constexpr double kExpCutoff = -700.0;

inline constexpr double kInvLn2 = 1.4426950408889634073599246810019;
// Cody-Waite split of ln 2: hi has 20 trailing zero bits, so k * kLn2Hi is
// exact for the |k| <= 1011 seen under the cutoff.
inline constexpr double kLn2Hi = 6.93147180369123816490e-01;
inline constexpr double kLn2Lo = 1.90821492927058770002e-10;

// Maclaurin coefficients 1/k! for exp on [-ln2/2, ln2/2]; degree 13 keeps the
// truncation error near 4e-18 relative, below one ulp.
inline constexpr double kExpPoly[14] = {
    1.0,
    1.0,
    1.0 / 2,
    1.0 / 6,
    1.0 / 24,
    1.0 / 120,
    1.0 / 720,
    1.0 / 5040,
    1.0 / 40320,
    1.0 / 362880,
    1.0 / 3628800,
    1.0 / 39916800,
    1.0 / 479001600,
    1.0 / 6227020800.0,
};

/// exp(t) for finite t <= 0. Range-reduce against ln 2, evaluate the
/// polynomial with FMA, scale by 2^k through exponent bits.
inline double exp_restricted(double t) {
  if (t < kExpCutoff) return 0.0;
  const double k = std::nearbyint(t * kInvLn2);
  double r = std::fma(k, -kLn2Hi, t);
  r = std::fma(k, -kLn2Lo, r);
  double p = kExpPoly[13];
  for (int i = 12; i >= 0; --i) p = std::fma(p, r, kExpPoly[i]);
  const auto ik = static_cast<std::int64_t>(k);
  const double scale =
      std::bit_cast<double>(static_cast<std::uint64_t>(ik + 1023) << 52);
  return p * scale;
}

/// One accumulation step: s0 += w G, s1 += w G c, with
/// G = wnorm-normalized Gaussian at (x - c). wnorm folds the kernel
/// normalization into the weight; neg_half_inv_ss = -1 / (2 sigma^2).
template <bool WithS1>
inline void gauss_element(double x, double c, double wnorm,
                          double neg_half_inv_ss, double* s0, double* s1) {
  const double d = x - c;
  const double t = (d * d) * neg_half_inv_ss;
  const double g = exp_restricted(t);
  const double wg = wnorm * g;
  *s0 = *s0 + wg;
  if constexpr (WithS1) *s1 = std::fma(wg, c, *s1);
}

using GaussPassFn = void (*)(const double* xs, std::size_t n, double center,
                             double wnorm, double neg_half_inv_ss, double* s0,
                             double* s1);

void gauss_pass_scalar(const double* xs, std::size_t n, double center,
                       double wnorm, double neg_half_inv_ss, double* s0,
                       double* s1);
#if defined(__x86_64__) || defined(_M_X64)
void gauss_pass_avx2(const double* xs, std::size_t n, double center,
                     double wnorm, double neg_half_inv_ss, double* s0,
                     double* s1);
#endif

}  // namespace qmee::kernels::detail
