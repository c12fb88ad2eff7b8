// AVX2 + FMA variant of the Gaussian accumulation pass. Mirrors the scalar
// element sequence operation for operation (sub, mul, mul, exp, mul, add,
// fmadd), which makes the two backends bit-identical; the remainder after the
// 4-wide main loop goes through the shared scalar element.

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include "element.hpp"

namespace qmee::kernels::detail {
namespace {

inline __m256d exp_vec(__m256d t) {
  const __m256d keep =
      _mm256_cmp_pd(t, _mm256_set1_pd(kExpCutoff), _CMP_GE_OQ);
  const __m256d k = _mm256_round_pd(
      _mm256_mul_pd(t, _mm256_set1_pd(kInvLn2)),
      _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_fmadd_pd(k, _mm256_set1_pd(-kLn2Hi), t);
  r = _mm256_fmadd_pd(k, _mm256_set1_pd(-kLn2Lo), r);
  __m256d p = _mm256_set1_pd(kExpPoly[13]);
  for (int i = 12; i >= 0; --i) {
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(kExpPoly[i]));
  }
  // 2^k through the exponent field; k is integral and within int32 range for
  // any finite t, and lanes below the cutoff are masked to zero at the end
  // (their scale can only be a signed power of two or infinity, never NaN).
  const __m128i k32 = _mm256_cvtpd_epi32(k);
  const __m256i k64 = _mm256_cvtepi32_epi64(k32);
  const __m256i bits =
      _mm256_slli_epi64(_mm256_add_epi64(k64, _mm256_set1_epi64x(1023)), 52);
  const __m256d scale = _mm256_castsi256_pd(bits);
  return _mm256_and_pd(_mm256_mul_pd(p, scale), keep);
}

template <bool WithS1>
inline void pass_impl(const double* xs, std::size_t n, double center,
                      double wnorm, double neg_half_inv_ss, double* s0,
                      double* s1) {
  const __m256d vc = _mm256_set1_pd(center);
  const __m256d vw = _mm256_set1_pd(wnorm);
  const __m256d vn = _mm256_set1_pd(neg_half_inv_ss);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d x = _mm256_loadu_pd(xs + i);
    const __m256d d = _mm256_sub_pd(x, vc);
    const __m256d t = _mm256_mul_pd(_mm256_mul_pd(d, d), vn);
    const __m256d g = exp_vec(t);
    const __m256d wg = _mm256_mul_pd(vw, g);
    _mm256_storeu_pd(s0 + i, _mm256_add_pd(_mm256_loadu_pd(s0 + i), wg));
    if constexpr (WithS1) {
      _mm256_storeu_pd(s1 + i,
                       _mm256_fmadd_pd(wg, vc, _mm256_loadu_pd(s1 + i)));
    }
  }
  for (; i < n; ++i) {
    gauss_element<WithS1>(xs[i], center, wnorm, neg_half_inv_ss, s0 + i,
                          WithS1 ? s1 + i : nullptr);
  }
}

}  // namespace

void gauss_pass_avx2(const double* xs, std::size_t n, double center,
                     double wnorm, double neg_half_inv_ss, double* s0,
                     double* s1) {
  if (s1 != nullptr) {
    pass_impl<true>(xs, n, center, wnorm, neg_half_inv_ss, s0, s1);
  } else {
    pass_impl<false>(xs, n, center, wnorm, neg_half_inv_ss, s0, nullptr);
  }
}

}  // namespace qmee::kernels::detail

#endif  // x86_64
