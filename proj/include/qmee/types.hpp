#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace qmee {

/// Ordered collection of prediction errors. Nonempty, every element finite;
/// both are enforced at construction so the criteria never divide by zero or
/// propagate NaN.
class ErrorVector {
 public:
  explicit ErrorVector(std::vector<double> values);

  std::span<const double> values() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t i) const noexcept { return values_[i]; }

 private:
  std::vector<double> values_;
};

/// Gaussian kernel bandwidth; strictly positive and finite.
class KernelWidth {
 public:
  explicit KernelWidth(double sigma);
  double value() const noexcept { return sigma_; }

 private:
  double sigma_;
};

enum class CriterionKind { mse, mcc, mee, qmee };

/// Tagged criterion choice with its parameters. sigma is absent exactly for
/// MSE; epsilon is present exactly for QMEE.
class CriterionSpec {
 public:
  static CriterionSpec mse() { return CriterionSpec(CriterionKind::mse, {}, {}); }
  static CriterionSpec mcc(KernelWidth sigma) {
    return CriterionSpec(CriterionKind::mcc, sigma, {});
  }
  static CriterionSpec mee(KernelWidth sigma) {
    return CriterionSpec(CriterionKind::mee, sigma, {});
  }
  static CriterionSpec qmee(KernelWidth sigma, double epsilon) {
    if (!(epsilon >= 0.0)) {
      throw std::invalid_argument("CriterionSpec: epsilon must be >= 0");
    }
    return CriterionSpec(CriterionKind::qmee, sigma, epsilon);
  }

  CriterionKind kind() const noexcept { return kind_; }
  bool has_sigma() const noexcept { return sigma_.has_value(); }
  KernelWidth sigma() const {
    if (!sigma_) throw std::logic_error("CriterionSpec: MSE has no sigma");
    return *sigma_;
  }
  double epsilon() const {
    if (!epsilon_) throw std::logic_error("CriterionSpec: only QMEE has epsilon");
    return *epsilon_;
  }

 private:
  CriterionSpec(CriterionKind kind, std::optional<KernelWidth> sigma,
                std::optional<double> epsilon)
      : kind_(kind), sigma_(sigma), epsilon_(epsilon) {}

  CriterionKind kind_;
  std::optional<KernelWidth> sigma_;
  std::optional<double> epsilon_;
};

}  // namespace qmee
