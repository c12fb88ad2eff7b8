#include "qmee/solvers.hpp"

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "qmee/kernels.hpp"

namespace qmee {
namespace {

Eigen::VectorXd solve_spd_or_throw(const Eigen::MatrixXd& lhs,
                                   const Eigen::VectorXd& rhs,
                                   const char* what, int iteration) {
  Eigen::FullPivLU<Eigen::MatrixXd> lu(lhs);
  if (!lu.isInvertible()) {
    throw SingularSystemError(
        std::string(what) + ": normal matrix singular (rank " +
            std::to_string(lu.rank()) + " of " + std::to_string(lhs.rows()) +
            ")" +
            (iteration >= 0 ? " at iteration " + std::to_string(iteration)
                            : std::string()),
        iteration);
  }
  return lu.solve(rhs);
}

struct AssembledSystem {
  Eigen::MatrixXd normal_matrix;
  Eigen::VectorXd moment_vector;
  double potential;  // quantized information potential at these errors
};

AssembledSystem assemble(const Eigen::MatrixXd& inputs,
                         const Eigen::VectorXd& targets,
                         std::span<const double> errors,
                         const Codebook& codebook, double sigma,
                         std::vector<double>& s0, std::vector<double>& s1,
                         std::vector<double>& weights) {
  const Eigen::Index n = inputs.cols();
  weights.resize(codebook.size());
  const auto counts = codebook.counts();
  for (std::size_t m = 0; m < weights.size(); ++m) {
    weights[m] = static_cast<double>(counts[m]);
  }
  s0.resize(errors.size());
  s1.resize(errors.size());
  kernels::weighted_gauss_sums_into(errors, codebook.words(), weights, sigma,
                                    s0, s1);

  const auto s0_map = Eigen::Map<const Eigen::VectorXd>(s0.data(), n);
  const auto s1_map = Eigen::Map<const Eigen::VectorXd>(s1.data(), n);
  AssembledSystem out;
  out.normal_matrix = inputs * s0_map.asDiagonal() * inputs.transpose();
  out.moment_vector =
      inputs * (s0_map.cwiseProduct(targets) - s1_map).matrix();
  const double nn = static_cast<double>(n);
  out.potential = s0_map.sum() / (nn * nn);
  return out;
}

enum class CodebookPolicy { quantize, pinned_zero };

void validate_dimensions(const Eigen::MatrixXd& inputs,
                         const Eigen::VectorXd& targets, const char* what) {
  if (inputs.cols() != targets.size()) {
    throw std::invalid_argument(std::string(what) +
                                ": inputs/targets size mismatch");
  }
  if (inputs.cols() < inputs.rows()) {
    throw std::invalid_argument(std::string(what) +
                                ": need at least d samples");
  }
}

FixedPointResult run_fixed_point(const Eigen::MatrixXd& inputs,
                                 const Eigen::VectorXd& targets,
                                 const FixedPointConfig& config,
                                 CodebookPolicy policy, const char* what) {
  validate_dimensions(inputs, targets, what);
  if (config.max_iterations < 1) {
    throw std::invalid_argument(std::string(what) + ": max_iterations >= 1");
  }
  if (!(config.convergence_tol > 0.0)) {
    throw std::invalid_argument(std::string(what) + ": convergence_tol > 0");
  }
  const Eigen::Index d = inputs.rows();
  const Eigen::Index n = inputs.cols();
  Eigen::VectorXd omega = config.initial_omega.size() == 0
                              ? Eigen::VectorXd::Zero(d).eval()
                              : config.initial_omega;
  if (omega.size() != d) {
    throw std::invalid_argument(std::string(what) + ": initial_omega size");
  }

  FixedPointResult result;
  result.trace.snapshots.push_back(omega);

  std::vector<double> errors(static_cast<std::size_t>(n));
  std::vector<double> s0, s1, weights;
  const double sigma = config.sigma.value();

  auto errors_at = [&](const Eigen::VectorXd& w) {
    Eigen::Map<Eigen::VectorXd>(errors.data(), n) =
        targets - inputs.transpose() * w;
    for (const double e : errors) {
      if (!std::isfinite(e)) return false;
    }
    return true;
  };
  auto codebook_at = [&]() {
    if (policy == CodebookPolicy::pinned_zero) {
      return Codebook::single_word(0.0, n);
    }
    return quantize_stream(ErrorVector(errors), config.epsilon).codebook;
  };

  int k = 0;
  for (; k < config.max_iterations; ++k) {
    if (!errors_at(omega)) {
      throw DivergenceError(
          std::string(what) + ": non-finite errors at iteration " +
              std::to_string(k) + " (weight blow-up)",
          k);
    }
    const Codebook codebook = codebook_at();
    const AssembledSystem sys =
        assemble(inputs, targets, errors, codebook, sigma, s0, s1, weights);
    result.trace.costs.push_back(sys.potential);

    Eigen::MatrixXd lhs = sys.normal_matrix;
    if (config.ridge > 0.0) {
      lhs.diagonal().array() += config.ridge;
    }
    const Eigen::VectorXd next =
        solve_spd_or_throw(lhs, sys.moment_vector, what, k);
    const double step = (next - omega).norm();
    omega = next;
    result.trace.snapshots.push_back(omega);
    if (step < config.convergence_tol) {
      result.trace.converged = true;
      ++k;
      break;
    }
  }
  result.trace.iterations_used = k;

  // cost at the final iterate
  if (errors_at(omega)) {
    const Codebook codebook = codebook_at();
    const AssembledSystem sys =
        assemble(inputs, targets, errors, codebook, sigma, s0, s1, weights);
    result.trace.costs.push_back(sys.potential);
  } else {
    throw DivergenceError(std::string(what) +
                              ": non-finite errors at final iterate",
                          result.trace.iterations_used);
  }
  result.model.omega = std::move(omega);
  return result;
}

}  // namespace

LinearModel solve_mse(const Eigen::MatrixXd& inputs,
                      const Eigen::VectorXd& targets) {
  validate_dimensions(inputs, targets, "solve_mse");
  const Eigen::MatrixXd gram = inputs * inputs.transpose();
  const Eigen::VectorXd moment = inputs * targets;
  return {solve_spd_or_throw(gram, moment, "solve_mse", -1)};
}

std::pair<Eigen::MatrixXd, Eigen::VectorXd> assemble_qmee_normal_system(
    const Eigen::MatrixXd& inputs, const Eigen::VectorXd& targets,
    const ErrorVector& errors, const Codebook& codebook, KernelWidth sigma) {
  if (inputs.cols() != targets.size() ||
      inputs.cols() != static_cast<Eigen::Index>(errors.size())) {
    throw std::invalid_argument(
        "assemble_qmee_normal_system: dimension mismatch");
  }
  if (codebook.total_count() != static_cast<std::int64_t>(errors.size())) {
    throw std::invalid_argument(
        "assemble_qmee_normal_system: codebook counts do not sum to N");
  }
  std::vector<double> s0, s1, weights;
  const AssembledSystem sys = assemble(inputs, targets, errors.values(),
                                       codebook, sigma.value(), s0, s1,
                                       weights);
  return {sys.normal_matrix, sys.moment_vector};
}

FixedPointResult solve_fixed_point_qmee(const Eigen::MatrixXd& inputs,
                                        const Eigen::VectorXd& targets,
                                        const FixedPointConfig& config) {
  if (std::isnan(config.epsilon) || config.epsilon < 0.0) {
    throw std::invalid_argument("solve_fixed_point_qmee: epsilon must be >= 0");
  }
  return run_fixed_point(inputs, targets, config, CodebookPolicy::quantize,
                         "solve_fixed_point_qmee");
}

FixedPointResult solve_fixed_point_mee(const Eigen::MatrixXd& inputs,
                                       const Eigen::VectorXd& targets,
                                       FixedPointConfig config) {
  config.epsilon = 0.0;
  return run_fixed_point(inputs, targets, config, CodebookPolicy::quantize,
                         "solve_fixed_point_mee");
}

FixedPointResult solve_fixed_point_mcc(const Eigen::MatrixXd& inputs,
                                       const Eigen::VectorXd& targets,
                                       const FixedPointConfig& config) {
  return run_fixed_point(inputs, targets, config, CodebookPolicy::pinned_zero,
                         "solve_fixed_point_mcc");
}

double rmse_weights(const LinearModel& estimated, const LinearModel& target) {
  if (estimated.omega.size() != target.omega.size()) {
    throw std::invalid_argument("rmse_weights: dimension mismatch");
  }
  const double d = static_cast<double>(estimated.omega.size());
  return std::sqrt((estimated.omega - target.omega).squaredNorm() / d);
}

}  // namespace qmee
