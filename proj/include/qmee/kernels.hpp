#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace qmee::kernels {

/// Weighted Gaussian-kernel accumulation passes, the arithmetic core of every
/// entropy-family criterion in this library.
///
/// There is one scalar reference implementation and an AVX2 variant selected
/// at runtime. Both execute the same per-element operation sequence (shared
/// polynomial exp, explicit FMA, no cross-lane reductions), so their results
/// are bit-identical; the equivalence suite asserts exact equality.
///
/// All kernel values use G_sigma(x) = exp(-x^2 / (2 sigma^2)) / (sqrt(2 pi) sigma)
/// with one library-wide underflow rule: exponent arguments below -700 yield
/// exactly 0.

enum class Backend { scalar, avx2 };

/// Backend in effect for batched passes. Resolved once: the QMEE_KERNEL_BACKEND
/// environment variable ("scalar" or "avx2") wins, otherwise the best
/// supported backend is picked.
Backend active_backend();
bool backend_supported(Backend b);
/// Returns false (and leaves the selection unchanged) if unsupported.
bool set_backend(Backend b);
std::string_view backend_name(Backend b);

/// exp(x) for finite x <= 0 under the underflow rule above. Deterministic
/// across platforms: correctly-rounded FMA plus a fixed polynomial, no libm.
double kernel_exp(double x);

struct PairAccumulators {
  std::vector<double> s0;  ///< s0[i] = sum_m w_m G_sigma(x_i - c_m)
  std::vector<double> s1;  ///< s1[i] = sum_m w_m G_sigma(x_i - c_m) c_m
};

/// Both weighted sums for every sample. centers/weights must be equal length.
PairAccumulators weighted_gauss_sums(std::span<const double> xs,
                                     std::span<const double> centers,
                                     std::span<const double> weights,
                                     double sigma);

/// Allocation-free variant; s0/s1 must have xs.size() elements and are
/// overwritten. s1 may be empty if the first-moment sum is not needed.
void weighted_gauss_sums_into(std::span<const double> xs,
                              std::span<const double> centers,
                              std::span<const double> weights, double sigma,
                              std::span<double> s0, std::span<double> s1);

/// sum_i sum_j G_sigma(x_i - x_j) over all ordered pairs, i == j included.
double pairwise_gauss_total(std::span<const double> xs, double sigma);

/// sum_j G_sigma(x - centers[j]). Single-query path; always scalar (values
/// match the batched passes by construction).
double gauss_sum_at(double x, std::span<const double> centers, double sigma);

/// sqrt(2 pi) to double precision; kernel normalization is 1 / (kSqrtTwoPi * sigma).
inline constexpr double kSqrtTwoPi = 2.5066282746310005024157652848110;

}  // namespace qmee::kernels
