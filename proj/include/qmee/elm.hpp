#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <utility>
#include <vector>

#include "qmee/rng.hpp"
#include "qmee/train_trace.hpp"
#include "qmee/types.hpp"

namespace qmee {

enum class Activation { logistic_sigmoid };

/// Single-hidden-layer network with random frozen hidden parameters; only the
/// output weights beta are trained.
struct ElmModel {
  Eigen::MatrixXd hidden_weights;  ///< L x d
  Eigen::VectorXd hidden_biases;   ///< L
  Eigen::VectorXd beta;            ///< L
  Activation activation = Activation::logistic_sigmoid;
};

/// Hidden weights and biases drawn i.i.d. uniform on [-1, 1], row by row then
/// biases; deterministic for a given stream.
std::pair<Eigen::MatrixXd, Eigen::VectorXd> init_hidden_layer(Eigen::Index d,
                                                              Eigen::Index l,
                                                              Philox4x64& rng);

/// Hidden activation matrix H (N x L), H(i, j) = f(w_j . x_i + b_j) with the
/// logistic sigmoid; inputs are N x d with one sample per row.
Eigen::MatrixXd hidden_map(const Eigen::MatrixXd& hidden_weights,
                           const Eigen::VectorXd& hidden_biases,
                           const Eigen::MatrixXd& inputs);

/// Ridge-regularized least squares beta = (H^T H + lambda I)^{-1} H^T t.
/// lambda = 0 is allowed when H^T H is nonsingular; otherwise throws.
Eigen::VectorXd solve_relm(const Eigen::MatrixXd& hidden_matrix,
                           const Eigen::VectorXd& targets, double lambda);

struct ElmTrainConfig {
  KernelWidth sigma;
  double epsilon = 0.0;
  double lambda_prime = 0.0;  ///< regularizer of the fixed-point system
  int max_iterations = 100;
  double convergence_tol = 1e-8;
};

/// Quantized-entropy training of the output weights by the fixed-point
/// iteration beta_k = (A + lambda' I)^{-1} B with A = H^T diag(s0) H and
/// B = H^T (s0 .* t - s1); errors and codebook are rebuilt each iteration
/// and beta_0 = 0. The epsilon = 0 configuration is the exact
/// minimum-error-entropy trainer.
std::pair<Eigen::VectorXd, TrainTrace> solve_elm_qmee(
    const Eigen::MatrixXd& hidden_matrix, const Eigen::VectorXd& targets,
    const ElmTrainConfig& config);

Eigen::VectorXd elm_predict(const ElmModel& model,
                            const Eigen::MatrixXd& inputs);

/// Entropy criteria are shift-invariant, so predictions carry an arbitrary
/// offset; adds the training-error mean to the outputs, which makes the
/// adjusted training errors zero-mean.
Eigen::VectorXd debias_shift_invariant(const Eigen::VectorXd& train_errors,
                                       const Eigen::VectorXd& test_outputs);

struct ElmCvGrid {
  std::vector<Eigen::Index> hidden_nodes;
  std::vector<double> sigma;
  std::vector<double> lambda_prime;
  std::vector<double> epsilon;
};

struct ElmCvChoice {
  Eigen::Index hidden_nodes = 0;
  double sigma = 0.0;
  double lambda_prime = 0.0;
  double epsilon = 0.0;
  double cv_rmse = 0.0;
};

/// k-fold cross-validated grid search over the quantized-entropy trainer.
/// Folds are contiguous blocks of a seeded shuffle; the combination with the
/// lowest mean debiased validation RMSE wins (ties keep the earlier combo).
ElmCvChoice cross_validate_elm_qmee(const Eigen::MatrixXd& inputs,
                                    const Eigen::VectorXd& targets,
                                    const ElmCvGrid& grid, int folds,
                                    int max_iterations, std::uint64_t seed);

}  // namespace qmee
