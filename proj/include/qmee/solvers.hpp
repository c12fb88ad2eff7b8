#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <utility>

#include "qmee/quantizer.hpp"
#include "qmee/train_trace.hpp"
#include "qmee/types.hpp"

namespace qmee {

struct LinearModel {
  Eigen::VectorXd omega;
};

class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, int iteration)
      : std::runtime_error(what), iteration_(iteration) {}
  /// Iteration at which the failure occurred; -1 for closed-form solves.
  int iteration() const noexcept { return iteration_; }

 private:
  int iteration_;
};

class SingularSystemError : public SolverError {
  using SolverError::SolverError;
};

class DivergenceError : public SolverError {
  using SolverError::SolverError;
};

struct FixedPointConfig {
  KernelWidth sigma;
  double epsilon = 0.0;        ///< quantization threshold (QMEE only)
  int max_iterations = 100;
  double convergence_tol = 1e-8;  ///< early stop on ||w_k - w_{k-1}||_2
  double ridge = 0.0;          ///< optional jitter added to the normal matrix
  Eigen::VectorXd initial_omega;  ///< empty means zero initialization
};

struct FixedPointResult {
  LinearModel model;
  TrainTrace trace;
};

/// Ordinary least squares through the normal equations; throws
/// SingularSystemError naming the rank deficiency when X X^T is singular.
LinearModel solve_mse(const Eigen::MatrixXd& inputs,
                      const Eigen::VectorXd& targets);

/// Normal system of the quantized-entropy fixed point at the current errors:
/// R = sum_i s0_i x_i x_i^T,  P = sum_i (s0_i y_i - s1_i) x_i, where s0/s1
/// are the occupancy-weighted kernel sums over the codebook. R is symmetric
/// positive semidefinite.
std::pair<Eigen::MatrixXd, Eigen::VectorXd> assemble_qmee_normal_system(
    const Eigen::MatrixXd& inputs, const Eigen::VectorXd& targets,
    const ErrorVector& errors, const Codebook& codebook, KernelWidth sigma);

/// Fixed-point iteration w_k = R(w_{k-1})^{-1} P(w_{k-1}), rebuilding errors
/// and codebook each iteration. Stops after max_iterations or when the weight
/// change drops below convergence_tol.
FixedPointResult solve_fixed_point_qmee(const Eigen::MatrixXd& inputs,
                                        const Eigen::VectorXd& targets,
                                        const FixedPointConfig& config);

/// Minimum-error-entropy solver: the epsilon = 0 special case (every distinct
/// error becomes its own code word, so each iteration costs O(N^2)).
FixedPointResult solve_fixed_point_mee(const Eigen::MatrixXd& inputs,
                                       const Eigen::VectorXd& targets,
                                       FixedPointConfig config);

/// Maximum-correntropy solver: the codebook is pinned to the single word {0}.
FixedPointResult solve_fixed_point_mcc(const Eigen::MatrixXd& inputs,
                                       const Eigen::VectorXd& targets,
                                       const FixedPointConfig& config);

/// sqrt(||w - w*||^2 / d). The normalization generalizes the two-parameter
/// convention 1/2 to arbitrary dimension; values match it exactly at d = 2.
double rmse_weights(const LinearModel& estimated, const LinearModel& target);

}  // namespace qmee
