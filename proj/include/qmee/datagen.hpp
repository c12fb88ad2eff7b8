#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "qmee/rng.hpp"

namespace qmee {

/// Impulsive mixture noise v = (1 - a) A + a B: a Bernoulli gate `a` with
/// occurrence probability selects between a background process A and a rare
/// large-variance outlier process B.
enum class BackgroundNoise {
  gauss_mix_symmetric,   ///< 0.5 N(3, 1) + 0.5 N(-3, 1)
  gauss_mix_asymmetric,  ///< (2/3) N(-5, 1) + (1/3) N(2, 1)
  binary,                ///< +/-2 with probability 1/2 each
  gaussian,              ///< N(0, 1)
  gauss_mix_alpha,       ///< 0.5 N(alpha, 0.01) + 0.5 N(-alpha, 0.01)
};

struct MixtureNoiseSpec {
  double occurrence_prob = 0.1;
  BackgroundNoise background = BackgroundNoise::gauss_mix_symmetric;
  double alpha = 0.1;  ///< offset of the gauss_mix_alpha background
  double outlier_mean = 0.0;
  double outlier_variance = 10000.0;
};

/// One draw from the mixture; consumes the stream deterministically
/// (gate uniform first, then the selected component).
double sample_mixture_noise(const MixtureNoiseSpec& spec, Philox4x64& rng);

struct RegressionDataset {
  Eigen::MatrixXd inputs;  ///< d x N, column per sample
  Eigen::VectorXd targets;
  std::optional<Eigen::VectorXd> true_omega;
  std::uint64_t seed = 0;
};

/// Linear-system data y = w*^T x + v with inputs uniform on [-2, 2]^d and
/// mixture noise. Default generating weights are (2, 1). `stream` selects an
/// independent substream under the same seed (one per Monte Carlo trial).
RegressionDataset gen_linear_regression(
    Eigen::Index n, const MixtureNoiseSpec& spec, std::uint64_t seed,
    std::uint64_t stream = 0,
    const Eigen::VectorXd& true_omega = (Eigen::VectorXd(2) << 2, 1).finished());

struct MackeyGlassParams {
  double tau = 17.0;
  double a = -0.1;
  double b = 0.2;
  double dt = 0.1;
  double history = 1.2;       ///< constant value of x(t) for t <= 0
  int transient_steps = 1000;  ///< integration steps discarded up front
};

/// Integrates dx/dt = a x(t) + b x(t - tau) / (1 + x(t - tau)^10) with
/// classic fourth-order Runge-Kutta; delayed values at stage times come from
/// cubic Hermite interpolation of the stored trajectory. After the transient
/// the series is subsampled to unit time spacing. Deterministic (no RNG).
std::vector<double> gen_mackey_glass(std::size_t length,
                                     const MackeyGlassParams& params = {});

struct TimeSeriesDataset {
  Eigen::MatrixXd train_inputs;  ///< 4 x train, delay vectors
  Eigen::VectorXd train_targets;
  Eigen::MatrixXd test_inputs;
  Eigen::VectorXd test_targets;
};

/// Builds delay vectors [x(t-24), x(t-18), x(t-12), x(t-6)] -> x(t) and splits
/// into consecutive train/test segments. When a noise spec is given the
/// mixture noise is added to the training targets only; test targets stay
/// clean.
TimeSeriesDataset embed_and_split(const std::vector<double>& raw,
                                  const MixtureNoiseSpec* noise,
                                  Eigen::Index train_len, Eigen::Index test_len,
                                  std::uint64_t seed, std::uint64_t stream = 0);

/// Per-feature affine map fitted on training data (rows = features).
struct MinMaxScaler {
  Eigen::VectorXd minimum;
  Eigen::VectorXd range;

  static MinMaxScaler fit(const Eigen::MatrixXd& train_features);
  Eigen::MatrixXd apply(const Eigen::MatrixXd& features) const;
  Eigen::MatrixXd invert(const Eigen::MatrixXd& normalized) const;
};

struct NormalizedPair {
  Eigen::MatrixXd train;
  Eigen::MatrixXd test;
  MinMaxScaler scaler;
};

/// Maps training features to [0, 1] per feature and applies the same map to
/// the test features (which may therefore leave [0, 1]; values are not
/// clipped). Throws naming the feature index if a training row has zero range.
NormalizedPair minmax_normalize(const Eigen::MatrixXd& train_features,
                                const Eigen::MatrixXd& test_features);

class CsvError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Loads a rectangular numeric CSV with a header row. The target column may
/// be named or given as a 0-based index; remaining columns become features.
RegressionDataset load_csv_dataset(
    const std::string& path, const std::variant<std::string, int>& target_column);

/// Writes a dataset in the same format (features f0.., target column last).
void write_csv_dataset(const std::string& path, const RegressionDataset& data);

}  // namespace qmee
