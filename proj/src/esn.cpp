#include "qmee/esn.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "qmee/kernels.hpp"
#include "qmee/solvers.hpp"

namespace qmee {
namespace {

double dense_spectral_radius(const Eigen::MatrixXd& m) {
  return Eigen::EigenSolver<Eigen::MatrixXd>(m, false)
      .eigenvalues()
      .cwiseAbs()
      .maxCoeff();
}

// Largest singular value by power iteration on W^T W; the iterate is
// deterministic (fixed start vector) and the Rayleigh quotient converges
// monotonically for the symmetric PSD product.
double sparse_max_singular_value(const Eigen::SparseMatrix<double>& w) {
  const Eigen::Index l = w.rows();
  Eigen::VectorXd v = Eigen::VectorXd::Constant(l, 1.0 / std::sqrt(double(l)));
  double lambda = 0.0;
  for (int it = 0; it < 200; ++it) {
    Eigen::VectorXd next = w.transpose() * (w * v);
    const double norm = next.norm();
    if (norm == 0.0) return 0.0;
    next /= norm;
    const double estimate = next.dot(w.transpose() * (w * next));
    if (it > 10 && std::fabs(estimate - lambda) <= 1e-12 * estimate) {
      lambda = estimate;
      break;
    }
    lambda = estimate;
    v = next;
  }
  return std::sqrt(lambda);
}

}  // namespace

EsnModel build_reservoir(Eigen::Index p, Eigen::Index l, double spectral_radius,
                         double sparsity, Philox4x64& rng) {
  if (p < 1 || l < 1) {
    throw std::invalid_argument("build_reservoir: P, L >= 1 required");
  }
  if (!(spectral_radius > 0.0) || !(sparsity > 0.0 && sparsity <= 1.0)) {
    throw std::invalid_argument("build_reservoir: bad radius or sparsity");
  }

  EsnModel model;
  model.spectral_radius = spectral_radius;
  model.sparsity = sparsity;
  model.w_in.resize(l, p);
  for (Eigen::Index r = 0; r < l; ++r) {
    for (Eigen::Index c = 0; c < p; ++c) {
      model.w_in(r, c) = rng.uniform(-1.0, 1.0);
    }
  }

  const auto cells = static_cast<std::uint64_t>(l) * static_cast<std::uint64_t>(l);
  const auto nonzeros = static_cast<std::size_t>(
      std::llround(sparsity * static_cast<double>(cells)));
  if (nonzeros == 0) {
    throw std::invalid_argument("build_reservoir: sparsity leaves no nonzeros");
  }

  for (int attempt = 0; attempt < 10; ++attempt) {
    // partial Fisher-Yates over the flattened index space gives exactly
    // `nonzeros` distinct positions
    std::vector<std::uint64_t> flat(cells);
    for (std::uint64_t i = 0; i < cells; ++i) flat[i] = i;
    for (std::size_t i = 0; i < nonzeros; ++i) {
      const auto j = i + static_cast<std::size_t>(rng.next_below(cells - i));
      std::swap(flat[i], flat[j]);
    }
    Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(l, l);
    for (std::size_t i = 0; i < nonzeros; ++i) {
      const auto row = static_cast<Eigen::Index>(flat[i] / static_cast<std::uint64_t>(l));
      const auto col = static_cast<Eigen::Index>(flat[i] % static_cast<std::uint64_t>(l));
      dense(row, col) = rng.uniform(-1.0, 1.0);
    }
    const double radius = dense_spectral_radius(dense);
    if (radius < 1e-12) continue;  // nilpotent or zero draw; resample
    dense *= spectral_radius / radius;
    model.w_x = dense.sparseView();
    model.w_x.makeCompressed();
    return model;
  }
  throw std::runtime_error(
      "build_reservoir: sampled matrix had no usable spectrum in 10 attempts");
}

ReservoirSpectrum reservoir_spectrum(const Eigen::SparseMatrix<double>& w_x) {
  return {dense_spectral_radius(Eigen::MatrixXd(w_x)),
          sparse_max_singular_value(w_x)};
}

StateCollection run_reservoir(const EsnModel& model,
                              const Eigen::MatrixXd& inputs,
                              Eigen::Index washout) {
  const Eigen::Index p = model.w_in.cols();
  const Eigen::Index l = model.w_in.rows();
  if (inputs.rows() != p) {
    throw std::invalid_argument("run_reservoir: input dimension mismatch");
  }
  if (washout < 0 || washout >= inputs.cols()) {
    throw std::invalid_argument("run_reservoir: washout out of range");
  }
  StateCollection out;
  out.washout = washout;
  out.states.resize(p + l, inputs.cols());
  Eigen::VectorXd x = Eigen::VectorXd::Zero(l);
  for (Eigen::Index k = 0; k < inputs.cols(); ++k) {
    x = (model.w_x * x + model.w_in * inputs.col(k)).array().tanh();
    out.states.col(k).head(p) = inputs.col(k);
    out.states.col(k).tail(l) = x;
  }
  return out;
}

Eigen::MatrixXd solve_esn_ls(const StateCollection& states,
                             const Eigen::MatrixXd& targets, double ridge) {
  if (targets.cols() != states.states.cols()) {
    throw std::invalid_argument("solve_esn_ls: targets/states length mismatch");
  }
  const auto phi = states.usable_states();
  const Eigen::MatrixXd y = targets.rightCols(states.usable());
  if (ridge > 0.0) {
    Eigen::MatrixXd gram = phi * phi.transpose();
    gram.diagonal().array() += ridge;
    const Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
    return ldlt.solve(phi * y.transpose()).transpose();
  }
  const Eigen::MatrixXd design = phi.transpose();
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  if (qr.rank() < design.cols()) {
    throw SingularSystemError(
        "solve_esn_ls: state Gram matrix singular without ridge (rank " +
            std::to_string(qr.rank()) + " of " + std::to_string(design.cols()) +
            ")",
        -1);
  }
  return qr.solve(y.transpose()).transpose();
}

Eigen::VectorXd qmee_esn_gradient(const Eigen::RowVectorXd& w_out_row,
                                  const Eigen::MatrixXd& phi,
                                  const Eigen::RowVectorXd& targets_row,
                                  const Codebook& codebook, KernelWidth sigma) {
  const Eigen::Index n = phi.cols();
  if (w_out_row.size() != phi.rows() || targets_row.size() != n) {
    throw std::invalid_argument("qmee_esn_gradient: dimension mismatch");
  }
  if (codebook.total_count() != static_cast<std::int64_t>(n)) {
    throw std::invalid_argument(
        "qmee_esn_gradient: codebook counts do not sum to the sample count");
  }
  const Eigen::RowVectorXd errors = targets_row - w_out_row * phi;
  std::vector<double> weights(codebook.size());
  const auto counts = codebook.counts();
  for (std::size_t m = 0; m < weights.size(); ++m) {
    weights[m] = static_cast<double>(counts[m]);
  }
  const auto sums = kernels::weighted_gauss_sums(
      std::span<const double>(errors.data(), static_cast<std::size_t>(n)),
      codebook.words(), weights, sigma.value());
  Eigen::VectorXd coeff(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    coeff[k] = sums.s0[static_cast<std::size_t>(k)] * errors[k] -
               sums.s1[static_cast<std::size_t>(k)];
  }
  const double nn = static_cast<double>(n);
  const double s = sigma.value();
  return (phi * coeff) / (nn * nn * s * s);
}

std::pair<Eigen::MatrixXd, TrainTrace> train_esn_qmee(
    const StateCollection& states, const Eigen::MatrixXd& targets,
    const Eigen::MatrixXd& w_init, const RmsPropConfig& config) {
  const Eigen::Index dim = states.states.rows();
  if (targets.cols() != states.states.cols()) {
    throw std::invalid_argument("train_esn_qmee: targets/states mismatch");
  }
  if (w_init.cols() != dim) {
    throw std::invalid_argument("train_esn_qmee: w_init width mismatch");
  }
  if (config.epochs < 1 || !(config.eta > 0.0) ||
      !(config.rho >= 0.0 && config.rho < 1.0) || !(config.r > 0.0) ||
      std::isnan(config.epsilon) || config.epsilon < 0.0) {
    throw std::invalid_argument("train_esn_qmee: bad configuration");
  }

  const Eigen::MatrixXd phi = states.usable_states();
  const Eigen::MatrixXd y = targets.rightCols(states.usable());
  const Eigen::Index q = targets.rows();
  const Eigen::Index n = phi.cols();
  const double nn = static_cast<double>(n);
  const double sigma = config.sigma.value();

  Eigen::MatrixXd w = w_init;
  Eigen::MatrixXd v = Eigen::MatrixXd::Zero(q, dim);
  Eigen::MatrixXd grad(q, dim);

  TrainTrace trace;
  std::vector<double> errors(static_cast<std::size_t>(n));
  std::vector<double> s0(errors.size()), s1(errors.size()), weights;

  auto flatten = [&](const Eigen::MatrixXd& m) {
    return Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(m.data(), m.size()));
  };
  trace.snapshots.push_back(flatten(w));

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    double objective = 0.0;
    for (Eigen::Index row = 0; row < q; ++row) {
      Eigen::Map<Eigen::RowVectorXd>(errors.data(), n) =
          y.row(row) - w.row(row) * phi;
      bool finite = true;
      for (const double e : errors) {
        if (!std::isfinite(e)) {
          finite = false;
          break;
        }
      }
      if (!finite) {
        trace.iterations_used = epoch;
        throw EsnDivergenceError(
            "train_esn_qmee: non-finite errors at epoch " +
                std::to_string(epoch),
            std::move(trace), epoch);
      }
      const Codebook codebook =
          quantize_stream(ErrorVector(errors), config.epsilon).codebook;
      weights.resize(codebook.size());
      const auto counts = codebook.counts();
      for (std::size_t m = 0; m < weights.size(); ++m) {
        weights[m] = static_cast<double>(counts[m]);
      }
      kernels::weighted_gauss_sums_into(errors, codebook.words(), weights,
                                        sigma, s0, s1);
      Eigen::VectorXd coeff(n);
      double potential = 0.0;
      for (Eigen::Index k = 0; k < n; ++k) {
        const auto ku = static_cast<std::size_t>(k);
        potential += s0[ku];
        coeff[k] = s0[ku] * errors[ku] - s1[ku];
      }
      objective -= potential / (nn * nn);
      // descent direction on J = -I2q: negate the potential's ascent
      // gradient; same arithmetic as qmee_esn_gradient so the two paths
      // agree bit for bit
      grad.row(row) = -((phi * coeff) / (nn * nn * sigma * sigma)).transpose();
    }
    trace.costs.push_back(objective);
    if (!std::isfinite(objective)) {
      trace.iterations_used = epoch;
      throw EsnDivergenceError(
          "train_esn_qmee: objective diverged at epoch " +
              std::to_string(epoch),
          std::move(trace), epoch);
    }
    v = config.rho * v + (1.0 - config.rho) * grad.cwiseProduct(grad);
    w -= config.eta *
         grad.cwiseQuotient((v.array() + config.r).sqrt().matrix());
    trace.snapshots.push_back(flatten(w));
  }
  trace.iterations_used = config.epochs;
  // objective at the final weights
  double final_objective = 0.0;
  for (Eigen::Index row = 0; row < q; ++row) {
    Eigen::Map<Eigen::RowVectorXd>(errors.data(), n) =
        y.row(row) - w.row(row) * phi;
    const Codebook codebook =
        quantize_stream(ErrorVector(errors), config.epsilon).codebook;
    weights.resize(codebook.size());
    const auto counts = codebook.counts();
    for (std::size_t m = 0; m < weights.size(); ++m) {
      weights[m] = static_cast<double>(counts[m]);
    }
    kernels::weighted_gauss_sums_into(errors, codebook.words(), weights, sigma,
                                      s0, {});
    double potential = 0.0;
    for (const double val : s0) potential += val;
    final_objective -= potential / (nn * nn);
  }
  trace.costs.push_back(final_objective);
  return {std::move(w), std::move(trace)};
}

double nrmse(const Eigen::VectorXd& targets, const Eigen::VectorXd& outputs) {
  if (targets.size() != outputs.size() || targets.size() == 0) {
    throw std::invalid_argument("nrmse: size mismatch");
  }
  const double n = static_cast<double>(targets.size());
  const double mean = targets.mean();
  const double variance = (targets.array() - mean).square().sum() / n;
  if (!(variance > 0.0)) {
    throw std::invalid_argument("nrmse: target variance is zero");
  }
  return std::sqrt((targets - outputs).squaredNorm() / (n * variance));
}

}  // namespace qmee
