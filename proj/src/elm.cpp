#include "qmee/elm.hpp"

#include <cmath>
#include <stdexcept>

#include "qmee/kernels.hpp"
#include "qmee/quantizer.hpp"
#include "qmee/solvers.hpp"

namespace qmee {
namespace {

Eigen::VectorXd solve_or_throw(const Eigen::MatrixXd& lhs,
                               const Eigen::VectorXd& rhs, const char* what,
                               int iteration) {
  Eigen::FullPivLU<Eigen::MatrixXd> lu(lhs);
  if (!lu.isInvertible()) {
    throw SingularSystemError(
        std::string(what) + ": system singular (rank " +
            std::to_string(lu.rank()) + " of " + std::to_string(lhs.rows()) +
            ")",
        iteration);
  }
  return lu.solve(rhs);
}

}  // namespace

std::pair<Eigen::MatrixXd, Eigen::VectorXd> init_hidden_layer(Eigen::Index d,
                                                              Eigen::Index l,
                                                              Philox4x64& rng) {
  if (d < 1 || l < 1) {
    throw std::invalid_argument("init_hidden_layer: d, L >= 1 required");
  }
  Eigen::MatrixXd weights(l, d);
  for (Eigen::Index r = 0; r < l; ++r) {
    for (Eigen::Index c = 0; c < d; ++c) {
      weights(r, c) = rng.uniform(-1.0, 1.0);
    }
  }
  Eigen::VectorXd biases(l);
  for (Eigen::Index r = 0; r < l; ++r) {
    biases[r] = rng.uniform(-1.0, 1.0);
  }
  return {std::move(weights), std::move(biases)};
}

Eigen::MatrixXd hidden_map(const Eigen::MatrixXd& hidden_weights,
                           const Eigen::VectorXd& hidden_biases,
                           const Eigen::MatrixXd& inputs) {
  if (hidden_weights.cols() != inputs.cols() ||
      hidden_weights.rows() != hidden_biases.size()) {
    throw std::invalid_argument("hidden_map: dimension mismatch");
  }
  Eigen::MatrixXd pre = inputs * hidden_weights.transpose();
  pre.rowwise() += hidden_biases.transpose();
  return ((-pre.array()).exp() + 1.0).inverse().matrix();
}

Eigen::VectorXd solve_relm(const Eigen::MatrixXd& hidden_matrix,
                           const Eigen::VectorXd& targets, double lambda) {
  if (hidden_matrix.rows() != targets.size()) {
    throw std::invalid_argument("solve_relm: H rows must match targets");
  }
  if (!(lambda >= 0.0)) {
    throw std::invalid_argument("solve_relm: lambda must be >= 0");
  }
  Eigen::MatrixXd lhs = hidden_matrix.transpose() * hidden_matrix;
  lhs.diagonal().array() += lambda;
  return solve_or_throw(lhs, hidden_matrix.transpose() * targets, "solve_relm",
                        -1);
}

std::pair<Eigen::VectorXd, TrainTrace> solve_elm_qmee(
    const Eigen::MatrixXd& hidden_matrix, const Eigen::VectorXd& targets,
    const ElmTrainConfig& config) {
  const Eigen::Index n = hidden_matrix.rows();
  const Eigen::Index l = hidden_matrix.cols();
  if (n != targets.size()) {
    throw std::invalid_argument("solve_elm_qmee: H rows must match targets");
  }
  if (config.max_iterations < 1 || !(config.convergence_tol > 0.0) ||
      !(config.lambda_prime >= 0.0) || std::isnan(config.epsilon) ||
      config.epsilon < 0.0) {
    throw std::invalid_argument("solve_elm_qmee: bad configuration");
  }

  const double sigma = config.sigma.value();
  const double nn = static_cast<double>(n);
  // lambda' = 2 lambda N^2 sigma^2 relates the system regularizer to the
  // objective-level weight decay.
  const double lambda = config.lambda_prime / (2.0 * nn * nn * sigma * sigma);

  Eigen::VectorXd beta = Eigen::VectorXd::Zero(l);
  TrainTrace trace;
  trace.snapshots.push_back(beta);

  std::vector<double> errors(static_cast<std::size_t>(n));
  std::vector<double> s0(errors.size()), s1(errors.size()), weights;

  auto objective_and_system = [&](const Eigen::VectorXd& b,
                                  Eigen::MatrixXd* lhs, Eigen::VectorXd* rhs) {
    Eigen::Map<Eigen::VectorXd>(errors.data(), n) =
        targets - hidden_matrix * b;
    for (const double e : errors) {
      if (!std::isfinite(e)) {
        throw DivergenceError("solve_elm_qmee: non-finite errors",
                              trace.iterations_used);
      }
    }
    const Codebook codebook =
        quantize_stream(ErrorVector(errors), config.epsilon).codebook;
    weights.resize(codebook.size());
    const auto counts = codebook.counts();
    for (std::size_t m = 0; m < weights.size(); ++m) {
      weights[m] = static_cast<double>(counts[m]);
    }
    kernels::weighted_gauss_sums_into(errors, codebook.words(), weights, sigma,
                                      s0, s1);
    const auto s0_map = Eigen::Map<const Eigen::VectorXd>(s0.data(), n);
    const auto s1_map = Eigen::Map<const Eigen::VectorXd>(s1.data(), n);
    if (lhs != nullptr) {
      *lhs = hidden_matrix.transpose() * s0_map.asDiagonal() * hidden_matrix;
      lhs->diagonal().array() += config.lambda_prime;
      *rhs = hidden_matrix.transpose() *
             (s0_map.cwiseProduct(targets) - s1_map).matrix();
    }
    const double potential = s0_map.sum() / (nn * nn);
    return -potential + lambda * b.squaredNorm();
  };

  int k = 0;
  for (; k < config.max_iterations; ++k) {
    Eigen::MatrixXd lhs;
    Eigen::VectorXd rhs;
    trace.costs.push_back(objective_and_system(beta, &lhs, &rhs));
    const Eigen::VectorXd next = solve_or_throw(lhs, rhs, "solve_elm_qmee", k);
    const double step = (next - beta).norm();
    beta = next;
    trace.snapshots.push_back(beta);
    if (step < config.convergence_tol) {
      trace.converged = true;
      ++k;
      break;
    }
  }
  trace.iterations_used = k;
  trace.costs.push_back(objective_and_system(beta, nullptr, nullptr));
  return {std::move(beta), std::move(trace)};
}

Eigen::VectorXd elm_predict(const ElmModel& model,
                            const Eigen::MatrixXd& inputs) {
  if (model.beta.size() != model.hidden_weights.rows()) {
    throw std::invalid_argument("elm_predict: beta/hidden size mismatch");
  }
  return hidden_map(model.hidden_weights, model.hidden_biases, inputs) *
         model.beta;
}

Eigen::VectorXd debias_shift_invariant(const Eigen::VectorXd& train_errors,
                                       const Eigen::VectorXd& test_outputs) {
  if (train_errors.size() == 0) {
    throw std::invalid_argument("debias_shift_invariant: empty training errors");
  }
  return test_outputs.array() + train_errors.mean();
}

ElmCvChoice cross_validate_elm_qmee(const Eigen::MatrixXd& inputs,
                                    const Eigen::VectorXd& targets,
                                    const ElmCvGrid& grid, int folds,
                                    int max_iterations, std::uint64_t seed) {
  const Eigen::Index n = inputs.rows();
  if (folds < 2 || n < folds) {
    throw std::invalid_argument("cross_validate_elm_qmee: need 2 <= folds <= N");
  }
  if (grid.hidden_nodes.empty() || grid.sigma.empty() ||
      grid.lambda_prime.empty() || grid.epsilon.empty()) {
    throw std::invalid_argument("cross_validate_elm_qmee: empty grid axis");
  }

  // one seeded shuffle shared by every combination
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
  Philox4x64 shuffle_rng(seed, 0);
  for (std::size_t i = order.size() - 1; i > 0; --i) {
    const auto j = static_cast<std::size_t>(shuffle_rng.next_below(i + 1));
    std::swap(order[i], order[j]);
  }

  ElmCvChoice best;
  bool first = true;
  for (const Eigen::Index l : grid.hidden_nodes) {
    Philox4x64 hidden_rng(seed, 1 + static_cast<std::uint64_t>(l));
    const auto [w, b] = init_hidden_layer(inputs.cols(), l, hidden_rng);
    const Eigen::MatrixXd h_full = hidden_map(w, b, inputs);
    for (const double sigma : grid.sigma) {
      for (const double lambda_prime : grid.lambda_prime) {
        for (const double epsilon : grid.epsilon) {
          double rmse_sum = 0.0;
          int usable_folds = 0;
          for (int f = 0; f < folds; ++f) {
            const Eigen::Index begin = n * f / folds;
            const Eigen::Index end = n * (f + 1) / folds;
            const Eigen::Index holdout = end - begin;
            Eigen::MatrixXd h_train(n - holdout, l);
            Eigen::VectorXd t_train(n - holdout);
            Eigen::MatrixXd h_val(holdout, l);
            Eigen::VectorXd t_val(holdout);
            Eigen::Index tr = 0, va = 0;
            for (Eigen::Index i = 0; i < n; ++i) {
              const Eigen::Index src = order[static_cast<std::size_t>(i)];
              if (i >= begin && i < end) {
                h_val.row(va) = h_full.row(src);
                t_val[va++] = targets[src];
              } else {
                h_train.row(tr) = h_full.row(src);
                t_train[tr++] = targets[src];
              }
            }
            ElmTrainConfig config{KernelWidth(sigma), epsilon, lambda_prime,
                                  max_iterations, 1e-8};
            try {
              const auto [beta, trace] =
                  solve_elm_qmee(h_train, t_train, config);
              const Eigen::VectorXd train_err = t_train - h_train * beta;
              const Eigen::VectorXd preds =
                  debias_shift_invariant(train_err, h_val * beta);
              rmse_sum += std::sqrt((t_val - preds).squaredNorm() /
                                    static_cast<double>(holdout));
              ++usable_folds;
            } catch (const SolverError&) {
              // combination failed on this fold; skip it
            }
          }
          if (usable_folds == 0) continue;
          const double mean_rmse = rmse_sum / usable_folds;
          if (first || mean_rmse < best.cv_rmse) {
            best = {l, sigma, lambda_prime, epsilon, mean_rmse};
            first = false;
          }
        }
      }
    }
  }
  if (first) {
    throw std::runtime_error(
        "cross_validate_elm_qmee: every grid combination failed");
  }
  return best;
}

}  // namespace qmee
