#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <stdexcept>
#include <utility>

#include "qmee/quantizer.hpp"
#include "qmee/rng.hpp"
#include "qmee/train_trace.hpp"
#include "qmee/types.hpp"

namespace qmee {

/// Echo state network: fixed random sparse reservoir, trained linear readout,
/// no output feedback.
struct EsnModel {
  Eigen::MatrixXd w_in;             ///< L x P
  Eigen::SparseMatrix<double> w_x;  ///< L x L
  Eigen::MatrixXd w_out;            ///< Q x (P + L)
  double spectral_radius = 0.0;
  double sparsity = 0.0;
};

struct ReservoirSpectrum {
  double spectral_radius;
  double max_singular_value;
};

/// Dense uniform [-1, 1] input weights; sparse reservoir with exactly
/// round(sparsity L^2) nonzero entries, rescaled so its spectral radius hits
/// the target within 1e-6. Resamples internally when the sampled matrix has
/// no usable spectrum (throws after 10 attempts).
EsnModel build_reservoir(Eigen::Index p, Eigen::Index l, double spectral_radius,
                         double sparsity, Philox4x64& rng);

/// Both the spectral radius and the largest singular value. The echo-state
/// literature states the sufficient condition sigma_max < 1 while common
/// practice tunes the radius; both are surfaced so callers can report them.
ReservoirSpectrum reservoir_spectrum(const Eigen::SparseMatrix<double>& w_x);

struct StateCollection {
  Eigen::MatrixXd states;  ///< (P + L) x T, column k = (u(k); x(k))
  Eigen::Index washout = 0;

  Eigen::Index usable() const { return states.cols() - washout; }
  auto usable_states() const { return states.rightCols(usable()); }
};

/// Runs the tanh reservoir x(k) = tanh(W^x x(k-1) + W^in u(k)) from x = 0 and
/// collects phi(k) = (u(k); x(k)); the first `washout` columns are flagged
/// for exclusion from training.
StateCollection run_reservoir(const EsnModel& model,
                              const Eigen::MatrixXd& inputs,
                              Eigen::Index washout);

/// Least-squares readout over the usable columns; ridge > 0 solves the
/// regularized normal equations, ridge = 0 uses a rank-revealing QR and
/// throws on rank deficiency.
Eigen::MatrixXd solve_esn_ls(const StateCollection& states,
                             const Eigen::MatrixXd& targets, double ridge = 0.0);

/// Ascent direction of the quantized information potential with respect to
/// one readout row, codebook held fixed:
/// (1/(N^2 sigma^2)) sum_k (s0_k e_k - s1_k) phi(k).
Eigen::VectorXd qmee_esn_gradient(const Eigen::RowVectorXd& w_out_row,
                                  const Eigen::MatrixXd& phi,
                                  const Eigen::RowVectorXd& targets_row,
                                  const Codebook& codebook, KernelWidth sigma);

struct RmsPropConfig {
  double eta = 1e-3;   ///< learning rate
  double rho = 0.9;    ///< forgetting factor of the squared-gradient average
  double r = 1e-6;     ///< stabilizer inside the square root
  int epochs = 100;
  KernelWidth sigma;
  double epsilon = 0.0;  ///< quantization threshold; 0 is exact entropy training
};

class EsnDivergenceError : public std::runtime_error {
 public:
  EsnDivergenceError(const std::string& what, TrainTrace trace, int epoch)
      : std::runtime_error(what), trace(std::move(trace)), epoch(epoch) {}
  TrainTrace trace;
  int epoch;
};

/// Full-batch RMSProp on the objective J = -I2q(e) (+epsilon quantization),
/// rebuilding errors and codebook once per epoch:
///   v <- rho v + (1 - rho) g^2,  w <- w - eta g / sqrt(v + r).
/// Runs exactly `epochs` epochs; a non-finite objective aborts with the trace
/// attached. Returns the readout and the per-epoch objective trace.
std::pair<Eigen::MatrixXd, TrainTrace> train_esn_qmee(
    const StateCollection& states, const Eigen::MatrixXd& targets,
    const Eigen::MatrixXd& w_init, const RmsPropConfig& config);

/// Normalized root mean squared error sqrt(sum (t - y)^2 / (N var(t))) with
/// the population variance of the targets; throws on zero variance.
double nrmse(const Eigen::VectorXd& targets, const Eigen::VectorXd& outputs);

}  // namespace qmee
