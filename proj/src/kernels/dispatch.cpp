#include "qmee/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "element.hpp"

namespace qmee::kernels {
namespace {

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(_M_X64)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Backend detect_backend() {
  if (const char* env = std::getenv("QMEE_KERNEL_BACKEND")) {
    const std::string req(env);
    if (req == "scalar") return Backend::scalar;
    if (req == "avx2" && cpu_has_avx2()) return Backend::avx2;
    // unknown or unsupported request: fall through to autodetection
  }
  return cpu_has_avx2() ? Backend::avx2 : Backend::scalar;
}

std::atomic<Backend>& backend_slot() {
  static std::atomic<Backend> slot{detect_backend()};
  return slot;
}

detail::GaussPassFn resolve_pass(Backend b) {
#if defined(__x86_64__) || defined(_M_X64)
  if (b == Backend::avx2) return &detail::gauss_pass_avx2;
#endif
  return &detail::gauss_pass_scalar;
}

void validate_common(std::span<const double> centers,
                     std::span<const double> weights, double sigma) {
  if (centers.size() != weights.size()) {
    throw std::invalid_argument("kernels: centers/weights size mismatch");
  }
  if (!(sigma > 0.0)) {
    throw std::invalid_argument("kernels: sigma must be positive");
  }
}

}  // namespace

Backend active_backend() { return backend_slot().load(); }

bool backend_supported(Backend b) {
  return b == Backend::scalar || (b == Backend::avx2 && cpu_has_avx2());
}

bool set_backend(Backend b) {
  if (!backend_supported(b)) return false;
  backend_slot().store(b);
  return true;
}

std::string_view backend_name(Backend b) {
  return b == Backend::avx2 ? "avx2" : "scalar";
}

double kernel_exp(double x) { return detail::exp_restricted(x); }

void weighted_gauss_sums_into(std::span<const double> xs,
                              std::span<const double> centers,
                              std::span<const double> weights, double sigma,
                              std::span<double> s0, std::span<double> s1) {
  validate_common(centers, weights, sigma);
  const bool with_s1 = !s1.empty();
  if (s0.size() != xs.size() || (with_s1 && s1.size() != xs.size())) {
    throw std::invalid_argument("kernels: accumulator size mismatch");
  }
  std::fill(s0.begin(), s0.end(), 0.0);
  if (with_s1) std::fill(s1.begin(), s1.end(), 0.0);

  const double norm = 1.0 / (kSqrtTwoPi * sigma);
  const double neg_half_inv_ss = -1.0 / (2.0 * sigma * sigma);
  const auto pass = resolve_pass(active_backend());
  for (std::size_t m = 0; m < centers.size(); ++m) {
    pass(xs.data(), xs.size(), centers[m], weights[m] * norm, neg_half_inv_ss,
         s0.data(), with_s1 ? s1.data() : nullptr);
  }
}

PairAccumulators weighted_gauss_sums(std::span<const double> xs,
                                     std::span<const double> centers,
                                     std::span<const double> weights,
                                     double sigma) {
  PairAccumulators acc;
  acc.s0.resize(xs.size());
  acc.s1.resize(xs.size());
  weighted_gauss_sums_into(xs, centers, weights, sigma, acc.s0, acc.s1);
  return acc;
}

double pairwise_gauss_total(std::span<const double> xs, double sigma) {
  if (!(sigma > 0.0)) {
    throw std::invalid_argument("kernels: sigma must be positive");
  }
  std::vector<double> s0(xs.size(), 0.0);
  const double norm = 1.0 / (kSqrtTwoPi * sigma);
  const double neg_half_inv_ss = -1.0 / (2.0 * sigma * sigma);
  const auto pass = resolve_pass(active_backend());
  for (const double center : xs) {
    pass(xs.data(), xs.size(), center, norm, neg_half_inv_ss, s0.data(),
         nullptr);
  }
  double total = 0.0;
  for (const double v : s0) total += v;
  return total;
}

double gauss_sum_at(double x, std::span<const double> centers, double sigma) {
  if (!(sigma > 0.0)) {
    throw std::invalid_argument("kernels: sigma must be positive");
  }
  const double norm = 1.0 / (kSqrtTwoPi * sigma);
  const double neg_half_inv_ss = -1.0 / (2.0 * sigma * sigma);
  double sum = 0.0;
  for (const double c : centers) {
    detail::gauss_element<false>(x, c, norm, neg_half_inv_ss, &sum, nullptr);
  }
  return sum;
}

}  // namespace qmee::kernels
