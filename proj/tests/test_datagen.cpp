#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <vector>

#include "qmee/datagen.hpp"

using namespace qmee;

namespace {

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_CASE("mixture noise moments") {
  // background only, standard gaussian
  {
    MixtureNoiseSpec spec;
    spec.occurrence_prob = 0.0;
    spec.background = BackgroundNoise::gaussian;
    Philox4x64 rng(61, 0);
    double sum = 0.0, sum_sq = 0.0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
      const double v = sample_mixture_noise(spec, rng);
      sum += v;
      sum_sq += v * v;
    }
    const double variance = sum_sq / n - (sum / n) * (sum / n);
    CHECK(variance == doctest::Approx(1.0).epsilon(0.03));
  }
  // outliers only
  {
    MixtureNoiseSpec spec;
    spec.occurrence_prob = 1.0;
    Philox4x64 rng(61, 1);
    double sum_sq = 0.0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
      const double v = sample_mixture_noise(spec, rng);
      sum_sq += v * v;
    }
    CHECK(sum_sq / n == doctest::Approx(10000.0).epsilon(0.05));
  }
  // binary background takes only two values
  {
    MixtureNoiseSpec spec;
    spec.occurrence_prob = 0.0;
    spec.background = BackgroundNoise::binary;
    Philox4x64 rng(61, 2);
    for (int i = 0; i < 1000; ++i) {
      const double v = sample_mixture_noise(spec, rng);
      CHECK((v == 2.0 || v == -2.0));
    }
  }
  // gate frequency within three standard errors
  {
    MixtureNoiseSpec spec;  // c = 0.1
    spec.background = BackgroundNoise::gaussian;
    Philox4x64 rng(61, 3);
    const int n = 100000;
    int outliers = 0;
    for (int i = 0; i < n; ++i) {
      if (std::fabs(sample_mixture_noise(spec, rng)) > 25.0) ++outliers;
    }
    // |v| > 25 is essentially impossible for the background
    const double freq = static_cast<double>(outliers) / n;
    // P(|outlier| > 25 sigma=100) ~ 0.8; accept a broad band around 0.08
    CHECK(freq > 0.05);
    CHECK(freq < 0.11);
  }
}

TEST_CASE("linear regression generator") {
  MixtureNoiseSpec spec;
  spec.occurrence_prob = 0.0;
  spec.background = BackgroundNoise::gaussian;
  const RegressionDataset data = gen_linear_regression(500, spec, 9);
  CHECK(data.inputs.rows() == 2);
  CHECK(data.inputs.cols() == 500);
  CHECK(data.inputs.minCoeff() >= -2.0);
  CHECK(data.inputs.maxCoeff() <= 2.0);
  REQUIRE(data.true_omega.has_value());
  // zero-noise variant reproduces the plane exactly
  MixtureNoiseSpec none;
  none.occurrence_prob = 0.0;
  none.background = BackgroundNoise::gauss_mix_alpha;
  none.alpha = 0.0;
  RegressionDataset clean = gen_linear_regression(100, none, 10);
  // alpha = 0 background still has spread 0.1; check against the residual
  for (Eigen::Index i = 0; i < 100; ++i) {
    const double residual =
        clean.targets[i] - clean.true_omega->dot(clean.inputs.col(i));
    CHECK(std::fabs(residual) < 1.0);
  }
  // determinism: identical seeds and streams give identical values
  const RegressionDataset again = gen_linear_regression(500, spec, 9);
  CHECK((again.inputs - data.inputs).norm() == 0.0);
  CHECK((again.targets - data.targets).norm() == 0.0);
  // a different substream gives a different dataset
  const RegressionDataset other = gen_linear_regression(500, spec, 9, 1);
  CHECK((other.targets - data.targets).norm() != 0.0);
}

TEST_CASE("mackey-glass integration") {
  // pure exponential decay when the delayed term is switched off
  {
    MackeyGlassParams params;
    params.b = 0.0;
    params.transient_steps = 0;
    const auto series = gen_mackey_glass(50, params);
    for (std::size_t j = 0; j < series.size(); ++j) {
      const double expect = 1.2 * std::exp(-0.1 * static_cast<double>(j));
      CHECK(series[j] == doctest::Approx(expect).epsilon(1e-6));
    }
  }
  // step-halving convergence on the chaotic system
  {
    MackeyGlassParams coarse;  // dt = 0.1
    MackeyGlassParams fine;
    fine.dt = 0.05;
    fine.transient_steps = 2000;  // same 100 time units
    const auto a = gen_mackey_glass(100, coarse);
    const auto b = gen_mackey_glass(100, fine);
    double worst = 0.0;
    for (std::size_t j = 0; j < 100; ++j) {
      worst = std::max(worst, std::fabs(a[j] - b[j]));
    }
    CHECK(worst < 1e-4);
  }
  // aperiodicity: no lag up to 500 repeats the sampled series to 1e-6
  {
    const auto series = gen_mackey_glass(1100);
    for (std::size_t lag = 1; lag <= 500; ++lag) {
      double max_gap = 0.0;
      for (std::size_t t = 0; t + lag < series.size(); ++t) {
        max_gap = std::max(max_gap, std::fabs(series[t + lag] - series[t]));
      }
      CHECK(max_gap > 1e-6);
    }
  }
  // values stay inside the known attractor band
  {
    const auto series = gen_mackey_glass(1000);
    for (const double v : series) {
      CHECK(v > 0.2);
      CHECK(v < 1.5);
    }
  }
}

TEST_CASE("embedding and split") {
  const auto raw = gen_mackey_glass(24 + 900 + 400);
  // no-noise embedding reproduces the raw series exactly
  const TimeSeriesDataset clean = embed_and_split(raw, nullptr, 900, 400, 0);
  CHECK(clean.train_inputs.rows() == 4);
  CHECK(clean.train_inputs.cols() == 900);
  CHECK(clean.test_inputs.cols() == 400);
  for (Eigen::Index k = 0; k < 900; ++k) {
    const auto t = static_cast<std::size_t>(k + 24);
    CHECK(clean.train_targets[k] == raw[t]);
    CHECK(clean.train_inputs(0, k) == raw[t - 24]);
    CHECK(clean.train_inputs(1, k) == raw[t - 18]);
    CHECK(clean.train_inputs(2, k) == raw[t - 12]);
    CHECK(clean.train_inputs(3, k) == raw[t - 6]);
  }
  // noisy split touches only the training targets
  MixtureNoiseSpec noise;
  noise.occurrence_prob = 0.2;
  noise.background = BackgroundNoise::gauss_mix_alpha;
  noise.alpha = 0.1;
  noise.outlier_variance = 0.01;
  const TimeSeriesDataset noisy = embed_and_split(raw, &noise, 900, 400, 7);
  CHECK((noisy.test_targets - clean.test_targets).norm() == 0.0);
  CHECK((noisy.train_targets - clean.train_targets).norm() != 0.0);
  CHECK((noisy.train_inputs - clean.train_inputs).norm() == 0.0);
  // too-short series is rejected
  CHECK_THROWS_AS(embed_and_split(std::vector<double>(100, 1.0), nullptr, 900,
                                  400, 0),
                  std::invalid_argument);
}

TEST_CASE("outlier gate frequency") {
  // shift the outlier process far from the background so every gated draw is
  // identifiable, then count the empirical outlier fraction
  MixtureNoiseSpec noise;
  noise.occurrence_prob = 0.2;
  noise.background = BackgroundNoise::gauss_mix_alpha;
  noise.alpha = 0.1;
  noise.outlier_mean = 100.0;
  noise.outlier_variance = 0.01;
  Philox4x64 rng(62, 0);
  const int n = 100000;
  int gated = 0;
  for (int i = 0; i < n; ++i) {
    if (sample_mixture_noise(noise, rng) > 50.0) ++gated;
  }
  const double freq = static_cast<double>(gated) / n;
  CHECK(freq > 0.19);
  CHECK(freq < 0.21);
}

TEST_CASE("minmax normalization") {
  Eigen::MatrixXd train(2, 3);
  train << 0.0, 5.0, 10.0, 1.0, 2.0, 3.0;
  Eigen::MatrixXd test(2, 2);
  test << -5.0, 20.0, 2.0, 2.5;
  const NormalizedPair pair = minmax_normalize(train, test);
  CHECK(pair.train(0, 0) == 0.0);
  CHECK(pair.train(0, 1) == 0.5);
  CHECK(pair.train(0, 2) == 1.0);
  CHECK(pair.train.minCoeff() >= 0.0);
  CHECK(pair.train.maxCoeff() <= 1.0);
  // test values outside the training range extend beyond [0, 1]
  CHECK(pair.test(0, 0) < 0.0);
  CHECK(pair.test(0, 1) > 1.0);
  // round trip
  const Eigen::MatrixXd back = pair.scaler.invert(pair.test);
  CHECK((back - test).norm() < 1e-12);
  // zero-range feature names its index
  Eigen::MatrixXd flat(2, 3);
  flat << 1.0, 1.0, 1.0, 0.0, 1.0, 2.0;
  try {
    minmax_normalize(flat, flat);
    FAIL("expected zero-range error");
  } catch (const std::invalid_argument& error) {
    CHECK(std::string(error.what()).find("feature 0") != std::string::npos);
  }
}

TEST_CASE("csv round trip and diagnostics") {
  const std::string path = temp_path("qmee_datagen_test.csv");
  MixtureNoiseSpec spec;
  spec.background = BackgroundNoise::gaussian;
  const RegressionDataset data = gen_linear_regression(37, spec, 12);
  write_csv_dataset(path, data);
  const RegressionDataset loaded = load_csv_dataset(path, std::string("target"));
  CHECK((loaded.inputs - data.inputs).norm() == 0.0);
  CHECK((loaded.targets - data.targets).norm() == 0.0);
  // numeric target index also works
  const RegressionDataset by_index = load_csv_dataset(path, 2);
  CHECK((by_index.targets - data.targets).norm() == 0.0);
  std::filesystem::remove(path);

  // small toy file
  {
    std::ofstream out(path);
    out << "a,b,y\n1,2,3\n4,5,6\n7,8,9\n";
  }
  const RegressionDataset toy = load_csv_dataset(path, std::string("y"));
  CHECK(toy.inputs.rows() == 2);
  CHECK(toy.inputs.cols() == 3);
  CHECK(toy.targets[2] == 9.0);
  std::filesystem::remove(path);

  // blank cell cites row and column
  {
    std::ofstream out(path);
    out << "a,b,y\n1,,3\n";
  }
  try {
    load_csv_dataset(path, std::string("y"));
    FAIL("expected csv error");
  } catch (const CsvError& error) {
    const std::string what = error.what();
    CHECK(what.find("row 2") != std::string::npos);
    CHECK(what.find("column 1") != std::string::npos);
  }
  std::filesystem::remove(path);

  // ragged row
  {
    std::ofstream out(path);
    out << "a,b,y\n1,2,3\n4,5\n";
  }
  CHECK_THROWS_AS(load_csv_dataset(path, std::string("y")), CsvError);
  std::filesystem::remove(path);

  CHECK_THROWS_AS(load_csv_dataset(temp_path("missing_file.csv"), 0), CsvError);
}
