#include "qmee/datagen.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace qmee {
namespace {

double pow10_fast(double x) {
  const double x2 = x * x;
  const double x4 = x2 * x2;
  const double x8 = x4 * x4;
  return x8 * x2;
}

struct MgIntegrator {
  // trajectory nodes x[i] and derivatives xd[i] at t = i * dt
  std::vector<double> x;
  std::vector<double> xd;
  const MackeyGlassParams& p;

  explicit MgIntegrator(const MackeyGlassParams& params) : p(params) {}

  double rhs(double value, double delayed) const {
    return p.a * value + p.b * delayed / (1.0 + pow10_fast(delayed));
  }

  /// x(t) for t <= current front, cubic Hermite between nodes.
  double delayed_at(double t) const {
    if (t <= 0.0) return p.history;
    const double s = t / p.dt;
    const auto i = static_cast<std::size_t>(s);
    const double theta = s - static_cast<double>(i);
    if (theta == 0.0) return x[i];
    const double h = p.dt;
    const double t2 = theta * theta;
    const double t3 = t2 * theta;
    return (2 * t3 - 3 * t2 + 1) * x[i] + (t3 - 2 * t2 + theta) * h * xd[i] +
           (-2 * t3 + 3 * t2) * x[i + 1] + (t3 - t2) * h * xd[i + 1];
  }

  void run(std::size_t steps) {
    x.reserve(steps + 1);
    xd.reserve(steps + 1);
    x.push_back(p.history);
    xd.push_back(rhs(p.history, p.history));
    for (std::size_t n = 0; n < steps; ++n) {
      const double t = static_cast<double>(n) * p.dt;
      const double xn = x[n];
      const double d0 = delayed_at(t - p.tau);
      const double dh = delayed_at(t + 0.5 * p.dt - p.tau);
      const double d1 = delayed_at(t + p.dt - p.tau);
      const double k1 = rhs(xn, d0);
      const double k2 = rhs(xn + 0.5 * p.dt * k1, dh);
      const double k3 = rhs(xn + 0.5 * p.dt * k2, dh);
      const double k4 = rhs(xn + p.dt * k3, d1);
      const double next = xn + p.dt * (k1 + 2 * k2 + 2 * k3 + k4) / 6.0;
      x.push_back(next);
      xd.push_back(rhs(next, d1));
    }
  }
};

double parse_cell(const std::string& cell, std::size_t row, std::size_t col) {
  std::size_t consumed = 0;
  double value = 0.0;
  try {
    value = std::stod(cell, &consumed);
  } catch (const std::exception&) {
    consumed = 0;
  }
  // allow trailing spaces only
  std::size_t rest = consumed;
  while (rest < cell.size() && (cell[rest] == ' ' || cell[rest] == '\t')) ++rest;
  if (consumed == 0 || rest != cell.size()) {
    throw CsvError("non-numeric cell at row " + std::to_string(row) +
                   ", column " + std::to_string(col) + ": '" + cell + "'");
  }
  return value;
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

}  // namespace

double sample_mixture_noise(const MixtureNoiseSpec& spec, Philox4x64& rng) {
  if (rng.bernoulli(spec.occurrence_prob)) {
    return rng.normal(spec.outlier_mean, std::sqrt(spec.outlier_variance));
  }
  switch (spec.background) {
    case BackgroundNoise::gauss_mix_symmetric:
      return rng.normal(rng.bernoulli(0.5) ? 3.0 : -3.0, 1.0);
    case BackgroundNoise::gauss_mix_asymmetric:
      return rng.normal(rng.bernoulli(2.0 / 3.0) ? -5.0 : 2.0, 1.0);
    case BackgroundNoise::binary:
      return rng.bernoulli(0.5) ? 2.0 : -2.0;
    case BackgroundNoise::gaussian:
      return rng.normal(0.0, 1.0);
    case BackgroundNoise::gauss_mix_alpha:
      return rng.normal(rng.bernoulli(0.5) ? spec.alpha : -spec.alpha, 0.1);
  }
  throw std::logic_error("sample_mixture_noise: unknown background");
}

RegressionDataset gen_linear_regression(Eigen::Index n,
                                        const MixtureNoiseSpec& spec,
                                        std::uint64_t seed,
                                        std::uint64_t stream,
                                        const Eigen::VectorXd& true_omega) {
  if (n < 1) {
    throw std::invalid_argument("gen_linear_regression: n >= 1 required");
  }
  const Eigen::Index d = true_omega.size();
  Philox4x64 rng(seed, stream);
  RegressionDataset out;
  out.inputs.resize(d, n);
  out.targets.resize(n);
  out.true_omega = true_omega;
  out.seed = seed;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index r = 0; r < d; ++r) {
      out.inputs(r, i) = rng.uniform(-2.0, 2.0);
    }
    out.targets[i] =
        true_omega.dot(out.inputs.col(i)) + sample_mixture_noise(spec, rng);
  }
  return out;
}

std::vector<double> gen_mackey_glass(std::size_t length,
                                     const MackeyGlassParams& params) {
  if (!(params.dt > 0.0) || params.tau <= 0.0) {
    throw std::invalid_argument("gen_mackey_glass: dt and tau must be > 0");
  }
  const double stride_real = 1.0 / params.dt;
  const auto stride = static_cast<std::size_t>(std::llround(stride_real));
  if (std::fabs(stride_real - static_cast<double>(stride)) > 1e-9 ||
      stride == 0) {
    throw std::invalid_argument(
        "gen_mackey_glass: 1/dt must be a whole number of steps");
  }
  const std::size_t steps =
      static_cast<std::size_t>(params.transient_steps) + length * stride;
  MgIntegrator integrator(params);
  integrator.run(steps);
  std::vector<double> out(length);
  for (std::size_t j = 0; j < length; ++j) {
    out[j] =
        integrator.x[static_cast<std::size_t>(params.transient_steps) +
                     j * stride];
  }
  return out;
}

TimeSeriesDataset embed_and_split(const std::vector<double>& raw,
                                  const MixtureNoiseSpec* noise,
                                  Eigen::Index train_len, Eigen::Index test_len,
                                  std::uint64_t seed, std::uint64_t stream) {
  constexpr int kLags[4] = {24, 18, 12, 6};
  const Eigen::Index total = train_len + test_len;
  if (train_len < 1 || test_len < 0) {
    throw std::invalid_argument("embed_and_split: bad split sizes");
  }
  if (static_cast<Eigen::Index>(raw.size()) < total + kLags[0]) {
    throw std::invalid_argument(
        "embed_and_split: series too short for requested split (need " +
        std::to_string(total + kLags[0]) + " samples, have " +
        std::to_string(raw.size()) + ")");
  }
  TimeSeriesDataset out;
  out.train_inputs.resize(4, train_len);
  out.train_targets.resize(train_len);
  out.test_inputs.resize(4, test_len);
  out.test_targets.resize(test_len);
  Philox4x64 rng(seed, stream);
  for (Eigen::Index k = 0; k < total; ++k) {
    const auto t = static_cast<std::size_t>(k + kLags[0]);
    const bool is_train = k < train_len;
    auto& inputs = is_train ? out.train_inputs : out.test_inputs;
    const Eigen::Index col = is_train ? k : k - train_len;
    for (int l = 0; l < 4; ++l) {
      inputs(l, col) = raw[t - static_cast<std::size_t>(kLags[l])];
    }
    double target = raw[t];
    if (is_train && noise != nullptr) {
      target += sample_mixture_noise(*noise, rng);
    }
    if (is_train) {
      out.train_targets[col] = target;
    } else {
      out.test_targets[col] = target;
    }
  }
  return out;
}

MinMaxScaler MinMaxScaler::fit(const Eigen::MatrixXd& train_features) {
  MinMaxScaler scaler;
  scaler.minimum = train_features.rowwise().minCoeff();
  scaler.range =
      train_features.rowwise().maxCoeff() - scaler.minimum;
  for (Eigen::Index r = 0; r < scaler.range.size(); ++r) {
    if (!(scaler.range[r] > 0.0)) {
      throw std::invalid_argument(
          "minmax_normalize: feature " + std::to_string(r) +
          " has zero range on the training data");
    }
  }
  return scaler;
}

Eigen::MatrixXd MinMaxScaler::apply(const Eigen::MatrixXd& features) const {
  return (features.colwise() - minimum).array().colwise() /
         range.array();
}

Eigen::MatrixXd MinMaxScaler::invert(const Eigen::MatrixXd& normalized) const {
  return (normalized.array().colwise() * range.array()).colwise() +
         minimum.array();
}

NormalizedPair minmax_normalize(const Eigen::MatrixXd& train_features,
                                const Eigen::MatrixXd& test_features) {
  if (train_features.rows() != test_features.rows()) {
    throw std::invalid_argument("minmax_normalize: feature count mismatch");
  }
  NormalizedPair out;
  out.scaler = MinMaxScaler::fit(train_features);
  out.train = out.scaler.apply(train_features);
  out.test = out.scaler.apply(test_features);
  return out;
}

RegressionDataset load_csv_dataset(
    const std::string& path,
    const std::variant<std::string, int>& target_column) {
  std::ifstream in(path);
  if (!in) {
    throw CsvError("cannot open dataset file: " + path);
  }
  std::string line;
  if (!std::getline(in, line)) {
    throw CsvError("empty dataset file: " + path);
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split_line(line);
  const std::size_t columns = header.size();
  if (columns < 2) {
    throw CsvError("dataset needs at least one feature and a target column");
  }

  std::size_t target_idx = columns;
  if (std::holds_alternative<int>(target_column)) {
    const int idx = std::get<int>(target_column);
    if (idx < 0 || static_cast<std::size_t>(idx) >= columns) {
      throw CsvError("target column index out of range: " +
                     std::to_string(idx));
    }
    target_idx = static_cast<std::size_t>(idx);
  } else {
    const auto& name = std::get<std::string>(target_column);
    for (std::size_t c = 0; c < columns; ++c) {
      if (header[c] == name) {
        target_idx = c;
        break;
      }
    }
    if (target_idx == columns) {
      throw CsvError("target column not found in header: " + name);
    }
  }

  std::vector<std::vector<double>> rows;
  std::size_t row_number = 1;
  while (std::getline(in, line)) {
    ++row_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split_line(line);
    if (cells.size() != columns) {
      throw CsvError("ragged row " + std::to_string(row_number) + ": expected " +
                     std::to_string(columns) + " cells, found " +
                     std::to_string(cells.size()));
    }
    std::vector<double> values(columns);
    for (std::size_t c = 0; c < columns; ++c) {
      values[c] = parse_cell(cells[c], row_number, c);
    }
    rows.push_back(std::move(values));
  }
  if (rows.empty()) {
    throw CsvError("dataset has a header but no data rows: " + path);
  }

  RegressionDataset out;
  const auto n = static_cast<Eigen::Index>(rows.size());
  const auto d = static_cast<Eigen::Index>(columns - 1);
  out.inputs.resize(d, n);
  out.targets.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::Index feature = 0;
    for (std::size_t c = 0; c < columns; ++c) {
      if (c == target_idx) {
        out.targets[i] = rows[static_cast<std::size_t>(i)][c];
      } else {
        out.inputs(feature++, i) = rows[static_cast<std::size_t>(i)][c];
      }
    }
  }
  return out;
}

void write_csv_dataset(const std::string& path, const RegressionDataset& data) {
  std::ofstream outfile(path);
  if (!outfile) {
    throw CsvError("cannot open file for writing: " + path);
  }
  const Eigen::Index d = data.inputs.rows();
  for (Eigen::Index r = 0; r < d; ++r) {
    outfile << 'f' << r << ',';
  }
  outfile << "target\n";
  char buf[32];
  for (Eigen::Index i = 0; i < data.inputs.cols(); ++i) {
    for (Eigen::Index r = 0; r < d; ++r) {
      std::snprintf(buf, sizeof buf, "%.17g", data.inputs(r, i));
      outfile << buf << ',';
    }
    std::snprintf(buf, sizeof buf, "%.17g", data.targets[i]);
    outfile << buf << '\n';
  }
  if (!outfile.good()) {
    throw CsvError("write failed: " + path);
  }
}

}  // namespace qmee
