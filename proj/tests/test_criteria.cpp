#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "qmee/criteria.hpp"
#include "qmee/quantizer.hpp"
#include "qmee/rng.hpp"

using namespace qmee;

namespace {

constexpr double kSqrtTwoPiRef = 2.5066282746310005024157652848110;

ErrorVector random_errors(std::size_t n, std::uint64_t stream,
                          double scale = 1.0) {
  Philox4x64 rng(31, stream);
  std::vector<double> v(n);
  for (auto& x : v) x = scale * rng.normal();
  return ErrorVector(v);
}

// brute-force references built on libm only
double ip_oracle(const ErrorVector& errors, double sigma) {
  const auto xs = errors.values();
  double sum = 0.0;
  for (const double a : xs) {
    for (const double b : xs) {
      sum += std::exp(-(a - b) * (a - b) / (2 * sigma * sigma));
    }
  }
  const double n = static_cast<double>(xs.size());
  return sum / (kSqrtTwoPiRef * sigma * n * n);
}

double qmee_oracle(const ErrorVector& errors, const Codebook& book,
                   double sigma) {
  double sum = 0.0;
  for (const double e : errors.values()) {
    for (std::size_t m = 0; m < book.size(); ++m) {
      const double d = e - book.words()[m];
      sum += static_cast<double>(book.counts()[m]) *
             std::exp(-d * d / (2 * sigma * sigma));
    }
  }
  const double n = static_cast<double>(errors.size());
  return sum / (kSqrtTwoPiRef * sigma * n * n);
}

}  // namespace

TEST_CASE("gaussian kernel closed form") {
  // peak at the origin
  CHECK(gaussian_kernel(0.0, KernelWidth(1.0)) ==
        doctest::Approx(0.3989422804014327).epsilon(1e-15));
  // one-sigma point for several widths
  for (const double sigma : {0.3, 1.0, 2.5}) {
    CHECK(gaussian_kernel(sigma, KernelWidth(sigma)) ==
          doctest::Approx(std::exp(-0.5) / (kSqrtTwoPiRef * sigma))
              .epsilon(1e-14));
  }
  // frozen value from a 60-digit evaluation of the closed form
  CHECK(gaussian_kernel(2.5, KernelWidth(1.5)) ==
        doctest::Approx(0.06631809252849912).epsilon(1e-14));
  // bounded by the peak
  Philox4x64 rng(7, 0);
  for (int i = 0; i < 1000; ++i) {
    const double sigma = 0.2 + 2.0 * rng.next_double();
    const double x = rng.normal(0.0, 3.0);
    CHECK(gaussian_kernel(x, KernelWidth(sigma)) <=
          1.0 / (kSqrtTwoPiRef * sigma) * (1 + 1e-15));
  }
}

TEST_CASE("parzen density") {
  CHECK(parzen_density(0.0, ErrorVector({0.0}), KernelWidth(1.0)) ==
        doctest::Approx(0.3989422804014327).epsilon(1e-15));
  CHECK(parzen_density(0.0, ErrorVector({-1.0, 1.0}), KernelWidth(1.0)) ==
        doctest::Approx(0.24197072451914334).epsilon(1e-14));
  // direct-summation oracle on random draws
  Philox4x64 rng(8, 0);
  std::vector<double> draws(50);
  for (auto& d : draws) d = rng.uniform(-1.0, 1.0);
  const ErrorVector errors(draws);
  double ref = 0.0;
  for (const double e : draws) {
    ref += std::exp(-(0.3 - e) * (0.3 - e) / (2 * 0.7 * 0.7));
  }
  ref /= kSqrtTwoPiRef * 0.7 * 50;
  CHECK(parzen_density(0.3, errors, KernelWidth(0.7)) ==
        doctest::Approx(ref).epsilon(1e-12));
}

TEST_CASE("parzen density integrates to one") {
  const auto errors = random_errors(25, 11);
  const KernelWidth sigma(0.8);
  // trapezoid over a wide bracket
  const double lo = -12.0, hi = 12.0;
  const int steps = 6000;
  double integral = 0.0;
  for (int i = 0; i <= steps; ++i) {
    const double x = lo + (hi - lo) * i / steps;
    const double w = (i == 0 || i == steps) ? 0.5 : 1.0;
    integral += w * parzen_density(x, errors, sigma);
  }
  integral *= (hi - lo) / steps;
  CHECK(integral == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("information potential") {
  // all-equal errors sit at the kernel peak; N a power of two keeps the
  // grouped sum exact
  const ErrorVector equal(std::vector<double>(8, 0.7));
  CHECK(information_potential(equal, KernelWidth(1.3)) ==
        1.0 / (kSqrtTwoPiRef * 1.3));
  // single error: pure self-interaction
  CHECK(information_potential(ErrorVector({0.0}), KernelWidth(2.0)) ==
        doctest::Approx(0.19947114020071635).epsilon(1e-15));
  // equals the mean Parzen density at the samples
  const auto errors = random_errors(20, 12);
  const KernelWidth sigma(1.0);
  double mean_density = 0.0;
  for (const double e : errors.values()) {
    mean_density += parzen_density(e, errors, sigma);
  }
  mean_density /= static_cast<double>(errors.size());
  CHECK(information_potential(errors, sigma) ==
        doctest::Approx(mean_density).epsilon(1e-12));
  // brute-force oracle
  CHECK(information_potential(errors, sigma) ==
        doctest::Approx(ip_oracle(errors, 1.0)).epsilon(1e-12));
}

TEST_CASE("quantized potential: exactness at zero threshold") {
  for (std::uint64_t stream = 0; stream < 50; ++stream) {
    const auto errors = random_errors(40 + stream, stream);
    const auto book = quantize_stream(errors, 0.0).codebook;
    const double exact = information_potential(errors, KernelWidth(1.1));
    const double quantized = qmee_potential(errors, book, KernelWidth(1.1));
    CHECK(std::fabs(quantized - exact) <= 1e-12 * exact);
  }
}

TEST_CASE("quantized potential: single word equals correntropy") {
  const auto errors = random_errors(64, 13);
  const auto book = Codebook::single_word(0.0, 64);
  const KernelWidth sigma(0.9);
  CHECK(qmee_potential(errors, book, sigma) ==
        doctest::Approx(correntropy_cost(errors, sigma)).epsilon(1e-14));
}

TEST_CASE("quantized potential: approximation bound") {
  Philox4x64 rng(37, 0);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 5 + static_cast<std::size_t>(rng.next_below(60));
    const double sigma = 0.5 + 2.5 * rng.next_double();
    const double epsilon = 0.6 * rng.next_double();
    std::vector<double> v(n);
    for (auto& x : v) x = rng.normal(0.0, 1.5);
    const ErrorVector errors(v);
    const auto book = quantize_stream(errors, epsilon).codebook;
    const double exact = information_potential(errors, KernelWidth(sigma));
    const double quantized = qmee_potential(errors, book, KernelWidth(sigma));
    CHECK(std::fabs(quantized - exact) <=
          epsilon * std::exp(-0.5) / sigma + 1e-15);
  }
}

TEST_CASE("quantized potential: boundedness") {
  Philox4x64 rng(38, 0);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + static_cast<std::size_t>(rng.next_below(50));
    const double sigma = 0.1 + 3.0 * rng.next_double();
    const double epsilon = rng.next_double();
    std::vector<double> v(n);
    for (auto& x : v) x = rng.normal();
    const ErrorVector errors(v);
    const auto book = quantize_stream(errors, epsilon).codebook;
    const double peak = 1.0 / (kSqrtTwoPiRef * sigma);
    CHECK(qmee_potential(errors, book, KernelWidth(sigma)) <= peak + 1e-12);
  }
}

TEST_CASE("weighted form identity") {
  // degenerate single-sample case collapses to the Parzen estimate
  const ErrorVector pair({0.0, 0.0});
  const auto single = quantize_stream(pair, 0.0).codebook;
  CHECK(qmee_weighted_form(pair, single, KernelWidth(1.0)) ==
        doctest::Approx(parzen_density(0.0, pair, KernelWidth(1.0)))
            .epsilon(1e-15));
  // weights alpha_m sum to one by construction
  const auto errors = random_errors(30, 14);
  const auto book = quantize_stream(errors, 0.2).codebook;
  double alpha_sum = 0.0;
  for (const auto count : book.counts()) {
    alpha_sum += static_cast<double>(count) / static_cast<double>(errors.size());
  }
  CHECK(alpha_sum == doctest::Approx(1.0).epsilon(1e-15));
  // the two algebraic routes agree
  for (std::uint64_t stream = 20; stream < 60; ++stream) {
    const auto e = random_errors(30, stream);
    const auto b = quantize_stream(e, 0.2).codebook;
    const double direct = qmee_potential(e, b, KernelWidth(0.8));
    const double weighted = qmee_weighted_form(e, b, KernelWidth(0.8));
    CHECK(std::fabs(weighted - direct) <= 1e-12 * direct);
  }
}

TEST_CASE("large-sigma expansion") {
  const auto errors = random_errors(40, 15);
  const auto book = quantize_stream(errors, 0.3).codebook;
  // all mass on one word with zero spread hits the peak exactly
  const ErrorVector flat(std::vector<double>(16, 2.0));
  const auto flat_book = quantize_stream(flat, 0.0).codebook;
  CHECK(qmee_large_sigma_approx(flat, flat_book, KernelWidth(3.0)) ==
        1.0 / (kSqrtTwoPiRef * 3.0));
  // high-sigma agreement against the exact evaluation
  {
    const KernelWidth sigma(100.0);
    const double exact = qmee_potential(errors, book, sigma);
    const double approx = qmee_large_sigma_approx(errors, book, sigma);
    CHECK(std::fabs(approx - exact) < 1e-6 * exact);
  }
  // scaled error decreases monotonically through the asymptotic regime
  double previous = 1e300;
  for (const double s : {10.0, 30.0, 100.0, 300.0}) {
    const KernelWidth sigma(s);
    const double gap = s * std::fabs(qmee_large_sigma_approx(errors, book, sigma) -
                                     qmee_potential(errors, book, sigma));
    CHECK(gap < previous);
    previous = gap;
  }
  // out of regime the expansion visibly diverges from the exact value
  {
    const ErrorVector wide = random_errors(40, 16, 4.0);
    const auto wide_book = quantize_stream(wide, 0.3).codebook;
    const KernelWidth sigma(0.5);
    const double exact = qmee_potential(wide, wide_book, sigma);
    const double approx = qmee_large_sigma_approx(wide, wide_book, sigma);
    CHECK(std::fabs(approx - exact) > 0.1 * exact);
  }
}

TEST_CASE("linear gradient: finite differences with frozen codebook") {
  Philox4x64 rng(41, 0);
  int checked = 0;
  for (int trial = 0; trial < 40; ++trial) {
    const auto d = static_cast<Eigen::Index>(2 + rng.next_below(4));
    const auto n = static_cast<Eigen::Index>(10 + rng.next_below(41));
    Eigen::MatrixXd inputs(d, n);
    Eigen::VectorXd targets(n), omega(d);
    for (Eigen::Index i = 0; i < d; ++i) omega[i] = rng.normal();
    for (Eigen::Index j = 0; j < n; ++j) {
      for (Eigen::Index i = 0; i < d; ++i) inputs(i, j) = rng.uniform(-2, 2);
      targets[j] = rng.normal(0.0, 2.0);
    }
    const double sigma = 0.6 + 1.4 * rng.next_double();
    const double epsilon = 0.3 * rng.next_double();

    std::vector<double> err(static_cast<std::size_t>(n));
    Eigen::Map<Eigen::VectorXd>(err.data(), n) =
        targets - inputs.transpose() * omega;
    const ErrorVector errors(err);
    const auto book = quantize_stream(errors, epsilon).codebook;

    const Eigen::VectorXd grad = qmee_gradient_linear(
        errors, inputs, targets, book, KernelWidth(sigma));

    Eigen::VectorXd fd(d);
    const double h = 1e-6;
    for (Eigen::Index c = 0; c < d; ++c) {
      auto potential_at = [&](double delta) {
        Eigen::VectorXd w = omega;
        w[c] += delta;
        std::vector<double> e(static_cast<std::size_t>(n));
        Eigen::Map<Eigen::VectorXd>(e.data(), n) =
            targets - inputs.transpose() * w;
        return qmee_potential(ErrorVector(e), book, KernelWidth(sigma));
      };
      fd[c] = (potential_at(h) - potential_at(-h)) / (2 * h);
    }
    const double scale = std::max(grad.norm(), fd.norm());
    if (scale < 1e-12) continue;  // degenerate flat instance
    CHECK((grad - fd).norm() <= 1e-5 * scale);
    ++checked;
  }
  CHECK(checked >= 30);
}

TEST_CASE("linear gradient: zero at symmetric configurations") {
  // all errors zero with the codebook at the origin
  Eigen::MatrixXd inputs(2, 6);
  Eigen::VectorXd targets(6);
  Philox4x64 rng(42, 0);
  for (Eigen::Index j = 0; j < 6; ++j) {
    inputs(0, j) = rng.uniform(-1, 1);
    inputs(1, j) = rng.uniform(-1, 1);
    targets[j] = 0.0;
  }
  const ErrorVector zeros(std::vector<double>(6, 0.0));
  const auto book = quantize_stream(zeros, 0.0).codebook;
  const Eigen::VectorXd grad =
      qmee_gradient_linear(zeros, inputs, targets, book, KernelWidth(1.0));
  CHECK(grad.norm() == 0.0);
}

TEST_CASE("mse cost") {
  CHECK(mse_cost(ErrorVector(std::vector<double>(5, 0.0))) == 0.0);
  CHECK(mse_cost(ErrorVector({1.0, -1.0})) == 1.0);
  const auto errors = random_errors(25, 17);
  double ref = 0.0;
  for (const double e : errors.values()) ref += e * e;
  ref /= 25.0;
  CHECK(mse_cost(errors) == doctest::Approx(ref).epsilon(1e-14));
}

TEST_CASE("correntropy cost") {
  const ErrorVector zeros(std::vector<double>(9, 0.0));
  CHECK(correntropy_cost(zeros, KernelWidth(0.5)) ==
        doctest::Approx(1.0 / (kSqrtTwoPiRef * 0.5)).epsilon(1e-15));
  const auto errors = random_errors(40, 18);
  const KernelWidth sigma(1.2);
  CHECK(correntropy_cost(errors, sigma) ==
        parzen_density(0.0, errors, sigma));
}

TEST_CASE("criterion spec variants") {
  CHECK(CriterionSpec::mse().kind() == CriterionKind::mse);
  CHECK_FALSE(CriterionSpec::mse().has_sigma());
  CHECK_THROWS_AS(CriterionSpec::mse().sigma(), std::logic_error);
  const auto spec = CriterionSpec::qmee(KernelWidth(1.5), 0.3);
  CHECK(spec.sigma().value() == 1.5);
  CHECK(spec.epsilon() == 0.3);
  CHECK_THROWS_AS(CriterionSpec::qmee(KernelWidth(1.0), -0.1),
                  std::invalid_argument);
  CHECK_THROWS_AS(CriterionSpec::mee(KernelWidth(1.0)).epsilon(),
                  std::logic_error);
  CHECK_THROWS_AS(KernelWidth(0.0), std::invalid_argument);
  CHECK_THROWS_AS(KernelWidth(-1.0), std::invalid_argument);
}

TEST_CASE("codebook mismatch is rejected") {
  const auto errors = random_errors(10, 19);
  const auto book = Codebook::single_word(0.0, 9);
  CHECK_THROWS_AS(qmee_potential(errors, book, KernelWidth(1.0)),
                  std::invalid_argument);
  CHECK_THROWS_AS(qmee_weighted_form(errors, book, KernelWidth(1.0)),
                  std::invalid_argument);
  CHECK_THROWS_AS(qmee_large_sigma_approx(errors, book, KernelWidth(1.0)),
                  std::invalid_argument);
}
