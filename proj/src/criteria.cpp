#include "qmee/criteria.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "qmee/kernels.hpp"

namespace qmee {
namespace {

void require_matching_codebook(const ErrorVector& errors,
                               const Codebook& codebook, const char* op) {
  if (codebook.total_count() != static_cast<std::int64_t>(errors.size())) {
    throw std::invalid_argument(std::string(op) +
                                ": codebook counts do not sum to the number "
                                "of errors (quantizer/criterion mismatch)");
  }
}

std::vector<double> counts_as_weights(const Codebook& codebook) {
  std::vector<double> w(codebook.size());
  const auto counts = codebook.counts();
  for (std::size_t m = 0; m < w.size(); ++m) {
    w[m] = static_cast<double>(counts[m]);
  }
  return w;
}

}  // namespace

ErrorVector::ErrorVector(std::vector<double> values)
    : values_(std::move(values)) {
  if (values_.empty()) {
    throw std::invalid_argument("ErrorVector: must be nonempty");
  }
  for (const double v : values_) {
    if (!std::isfinite(v)) {
      throw std::invalid_argument("ErrorVector: all elements must be finite");
    }
  }
}

KernelWidth::KernelWidth(double sigma) : sigma_(sigma) {
  if (!(std::isfinite(sigma) && sigma > 0.0)) {
    throw std::invalid_argument("KernelWidth: sigma must be positive finite");
  }
}

double gaussian_kernel(double x, KernelWidth sigma) {
  if (!std::isfinite(x)) {
    throw std::invalid_argument("gaussian_kernel: x must be finite");
  }
  const double s = sigma.value();
  const double norm = 1.0 / (kernels::kSqrtTwoPi * s);
  return norm * kernels::kernel_exp(-(x * x) / (2.0 * s * s));
}

double parzen_density(double x, const ErrorVector& errors, KernelWidth sigma) {
  const double sum = kernels::gauss_sum_at(x, errors.values(), sigma.value());
  return sum / static_cast<double>(errors.size());
}

double information_potential(const ErrorVector& errors, KernelWidth sigma) {
  const double n = static_cast<double>(errors.size());
  return kernels::pairwise_gauss_total(errors.values(), sigma.value()) /
         (n * n);
}

double qmee_potential(const ErrorVector& errors, const Codebook& codebook,
                      KernelWidth sigma) {
  require_matching_codebook(errors, codebook, "qmee_potential");
  const auto weights = counts_as_weights(codebook);
  std::vector<double> s0(errors.size());
  kernels::weighted_gauss_sums_into(errors.values(), codebook.words(), weights,
                                    sigma.value(), s0, {});
  double total = 0.0;
  for (const double v : s0) total += v;
  const double n = static_cast<double>(errors.size());
  return total / (n * n);
}

double qmee_weighted_form(const ErrorVector& errors, const Codebook& codebook,
                          KernelWidth sigma) {
  require_matching_codebook(errors, codebook, "qmee_weighted_form");
  const double n = static_cast<double>(errors.size());
  const auto words = codebook.words();
  const auto counts = codebook.counts();
  double value = 0.0;
  for (std::size_t m = 0; m < words.size(); ++m) {
    const double alpha = static_cast<double>(counts[m]) / n;
    value += alpha * parzen_density(words[m], errors, sigma);
  }
  return value;
}

double qmee_large_sigma_approx(const ErrorVector& errors,
                               const Codebook& codebook, KernelWidth sigma) {
  require_matching_codebook(errors, codebook, "qmee_large_sigma_approx");
  const double n = static_cast<double>(errors.size());
  const double s = sigma.value();
  const auto words = codebook.words();
  const auto counts = codebook.counts();
  double weighted_moment = 0.0;
  for (std::size_t m = 0; m < words.size(); ++m) {
    double mu = 0.0;
    for (const double e : errors.values()) {
      const double d = e - words[m];
      mu += d * d;
    }
    mu /= n;
    weighted_moment += (static_cast<double>(counts[m]) / n) * mu;
  }
  const double peak = 1.0 / (kernels::kSqrtTwoPi * s);
  return peak - weighted_moment / (2.0 * kernels::kSqrtTwoPi * s * s * s);
}

Eigen::VectorXd qmee_gradient_linear(const ErrorVector& errors,
                                     const Eigen::MatrixXd& inputs,
                                     const Eigen::VectorXd& targets,
                                     const Codebook& codebook,
                                     KernelWidth sigma) {
  const auto n = static_cast<Eigen::Index>(errors.size());
  if (inputs.cols() != n || targets.size() != n) {
    throw std::invalid_argument(
        "qmee_gradient_linear: inputs/targets must have one column per error");
  }
  require_matching_codebook(errors, codebook, "qmee_gradient_linear");

  const auto weights = counts_as_weights(codebook);
  const auto sums = kernels::weighted_gauss_sums(
      errors.values(), codebook.words(), weights, sigma.value());
  Eigen::VectorXd coeff(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    coeff[i] = sums.s0[i] * errors[static_cast<std::size_t>(i)] - sums.s1[i];
  }
  const double nn = static_cast<double>(n);
  const double s = sigma.value();
  return (inputs * coeff) / (nn * nn * s * s);
}

double mse_cost(const ErrorVector& errors) {
  double sum = 0.0;
  for (const double e : errors.values()) sum += e * e;
  return sum / static_cast<double>(errors.size());
}

double correntropy_cost(const ErrorVector& errors, KernelWidth sigma) {
  return parzen_density(0.0, errors, sigma);
}

}  // namespace qmee
