#include "qmee/bench/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <thread>
#include <vector>

#include "qmee/bench/svg.hpp"
#include "qmee/criteria.hpp"
#include "qmee/datagen.hpp"
#include "qmee/elm.hpp"
#include "qmee/esn.hpp"
#include "qmee/kernels.hpp"
#include "qmee/quantizer.hpp"
#include "qmee/solvers.hpp"

namespace qmee::bench {
namespace {

double now_seconds() {
  return std::chrono::duration<double>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

/// Runs body(0..count-1) on a small worker pool. Each index owns its RNG
/// substreams and result slots, so scheduling cannot affect the output.
void parallel_indices(int count, int threads,
                      const std::function<void(int)>& body) {
  threads = std::max(1, std::min(threads, count));
  if (threads == 1) {
    for (int i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(threads));
  for (int w = 0; w < threads; ++w) {
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
        body(i);
      }
    });
  }
  for (auto& t : pool) t.join();
}

int thread_count(const KeyValueConfig& config) {
  const auto requested = config.get_int_or("", "threads", 0);
  if (requested > 0) return static_cast<int>(requested);
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

MixtureNoiseSpec noise_case(const std::string& name) {
  MixtureNoiseSpec spec;  // occurrence 0.1, outliers N(0, 1e4)
  if (name == "case1") {
    spec.background = BackgroundNoise::gauss_mix_symmetric;
  } else if (name == "case2") {
    spec.background = BackgroundNoise::gauss_mix_asymmetric;
  } else if (name == "case3") {
    spec.background = BackgroundNoise::binary;
  } else if (name == "case4") {
    spec.background = BackgroundNoise::gaussian;
  } else {
    throw ConfigError("unknown noise_case: " + name +
                      " (expected case1..case4)");
  }
  return spec;
}

/// Broadcast access: singleton lists apply to every index.
double list_value(const std::vector<double>& values, std::size_t i,
                  const char* what) {
  if (values.size() == 1) return values[0];
  if (i < values.size()) return values[i];
  throw ConfigError(std::string(what) +
                    ": list shorter than alpha_list and not a single value");
}

/// Copy of the input configuration that materializes every default it reads,
/// so report headers carry the fully resolved settings.
class Resolved {
 public:
  explicit Resolved(const KeyValueConfig& config) : config_(config) {}

  std::string str(const std::string& section, const std::string& key,
                  const std::string& fallback) {
    if (!config_.has(section, key)) config_.set(section, key, fallback);
    return config_.get_string(section, key);
  }
  double num(const std::string& section, const std::string& key,
             double fallback) {
    if (!config_.has(section, key)) {
      config_.set(section, key, format_double(fallback));
    }
    return config_.get_double(section, key);
  }
  std::int64_t integer(const std::string& section, const std::string& key,
                       std::int64_t fallback) {
    if (!config_.has(section, key)) {
      config_.set(section, key, std::to_string(fallback));
    }
    return config_.get_int(section, key);
  }
  std::uint64_t seed() {
    return static_cast<std::uint64_t>(integer("", "seed", 0));
  }

  const KeyValueConfig& config() const { return config_; }
  KeyValueConfig& config() { return config_; }

  std::vector<std::pair<std::string, std::string>> header(
      const std::string& task, const std::string& metric) {
    config_.set("", "task", task);
    config_.set("", "metric", metric);
    config_.set("", "kernel_backend",
                std::string(kernels::backend_name(kernels::active_backend())));
    return config_.canonical_items();
  }

 private:
  KeyValueConfig config_;
};

struct CriterionSetup {
  std::string name;
  CriterionKind kind;
  double sigma = 0.0;
  double epsilon = 0.0;
};

std::vector<CriterionSetup> linreg_criteria(Resolved& resolved) {
  const auto& config = resolved.config();
  std::vector<CriterionSetup> out;
  if (config.has_section("mse")) {
    out.push_back({"mse", CriterionKind::mse, 0.0, 0.0});
  }
  if (config.has_section("mcc")) {
    out.push_back({"mcc", CriterionKind::mcc,
                   config.get_double("mcc", "sigma"), 0.0});
  }
  if (config.has_section("mee")) {
    out.push_back({"mee", CriterionKind::mee,
                   config.get_double("mee", "sigma"), 0.0});
  }
  if (config.has_section("qmee")) {
    out.push_back({"qmee", CriterionKind::qmee,
                   config.get_double("qmee", "sigma"),
                   config.get_double("qmee", "epsilon")});
  }
  if (out.empty()) {
    throw ConfigError(
        "no criterion sections found; add at least one of [mse] [mcc] [mee] "
        "[qmee]");
  }
  return out;
}

}  // namespace

ExperimentReport run_linreg_experiment(const KeyValueConfig& config_in) {
  Resolved resolved(config_in);
  const auto trials = static_cast<int>(resolved.integer("", "trials", 100));
  const auto n = resolved.integer("", "n", 200);
  const auto iterations = static_cast<int>(resolved.integer("", "iterations", 100));
  const double tolerance = resolved.num("", "tolerance", 1e-8);
  const double ridge = resolved.num("", "ridge", 0.0);
  const std::uint64_t seed = resolved.seed();
  const MixtureNoiseSpec spec = noise_case(resolved.str("", "noise_case", "case1"));
  const auto criteria = linreg_criteria(resolved);
  if (trials < 1) throw ConfigError("trials must be >= 1");

  ExperimentReport report;
  report.task = "linreg";
  report.metric_name = "rmse";
  report.header = resolved.header("linreg", "rmse");

  std::vector<std::vector<MetricRow>> results(static_cast<std::size_t>(trials));
  const auto body = [&](int trial) {
    const RegressionDataset data = gen_linear_regression(
        n, spec, seed, static_cast<std::uint64_t>(trial));
    const LinearModel truth{*data.true_omega};
    auto& rows = results[static_cast<std::size_t>(trial)];
    for (const auto& criterion : criteria) {
      MetricRow row;
      row.criterion = criterion.name;
      row.trial = trial;
      try {
        const double start = now_seconds();
        LinearModel model;
        if (criterion.kind == CriterionKind::mse) {
          model = solve_mse(data.inputs, data.targets);
          row.converged = true;
        } else {
          FixedPointConfig fp{KernelWidth(criterion.sigma), criterion.epsilon,
                              iterations, tolerance, ridge,
                              Eigen::VectorXd()};
          FixedPointResult result;
          switch (criterion.kind) {
            case CriterionKind::mcc:
              result = solve_fixed_point_mcc(data.inputs, data.targets, fp);
              break;
            case CriterionKind::mee:
              result = solve_fixed_point_mee(data.inputs, data.targets, fp);
              break;
            default:
              result = solve_fixed_point_qmee(data.inputs, data.targets, fp);
              break;
          }
          model = result.model;
          row.iterations = result.trace.iterations_used;
          row.converged = result.trace.converged;
        }
        row.wall_time_s = now_seconds() - start;
        row.metric = rmse_weights(model, truth);
      } catch (const SolverError& error) {
        row.failed = true;
        row.metric = std::nan("");
        row.note = error.what();
      }
      rows.push_back(std::move(row));
    }
  };
  parallel_indices(trials, thread_count(resolved.config()), body);
  for (auto& rows : results) {
    for (auto& row : rows) report.rows.push_back(std::move(row));
  }
  append_aggregates(report);
  return report;
}

ExperimentReport run_elm_experiment(const KeyValueConfig& config_in) {
  Resolved resolved(config_in);
  const auto trials = static_cast<int>(resolved.integer("", "trials", 100));
  const auto hidden_nodes = resolved.integer("", "hidden_nodes", 50);
  const auto iterations = static_cast<int>(resolved.integer("", "iterations", 100));
  const double tolerance = resolved.num("", "tolerance", 1e-8);
  const std::uint64_t seed = resolved.seed();
  if (trials < 1) throw ConfigError("trials must be >= 1");

  const bool from_csv = resolved.config().has("", "data_csv");
  Eigen::MatrixXd all_inputs;   // column per sample
  Eigen::VectorXd all_targets;
  Eigen::Index n_train = 0, n_test = 0;
  MixtureNoiseSpec noise;
  double noise_scale = 0.0;
  if (from_csv) {
    const std::string path = resolved.config().get_string("", "data_csv");
    const std::string target = resolved.str("", "target_column", "target");
    std::variant<std::string, int> column = target;
    if (!target.empty() &&
        target.find_first_not_of("0123456789") == std::string::npos) {
      column = std::stoi(target);
    }
    const RegressionDataset data = load_csv_dataset(path, column);
    all_inputs = data.inputs;
    all_targets = data.targets;
    const double train_fraction = resolved.num("", "train_fraction", 0.5);
    n_train = static_cast<Eigen::Index>(
        std::llround(train_fraction * static_cast<double>(all_inputs.cols())));
    n_test = all_inputs.cols() - n_train;
    if (n_train < 2 || n_test < 1) {
      throw ConfigError("train_fraction leaves too few samples");
    }
  } else {
    n_train = resolved.integer("", "n", 200);
    n_test = resolved.integer("", "n_test", 200);
    noise = noise_case(resolved.str("", "noise_case", "case4"));
    noise.occurrence_prob = resolved.num("", "occurrence", 0.1);
    noise_scale = resolved.num("", "noise_scale", 0.1);
  }

  struct ElmSetup {
    std::string name;
    bool entropy = false;  // trained by the quantized-entropy fixed point
    double lambda = 0.0;   // ridge of the plain trainers
    double sigma = 0.0;
    double epsilon = 0.0;
    double lambda_prime = 0.0;
  };
  std::vector<ElmSetup> criteria;
  const auto& cfg = resolved.config();
  if (cfg.has_section("elm")) {
    criteria.push_back({"elm", false, 0.0, 0.0, 0.0, 0.0});
  }
  if (cfg.has_section("relm")) {
    criteria.push_back(
        {"relm", false, cfg.get_double("relm", "lambda"), 0.0, 0.0, 0.0});
  }
  if (cfg.has_section("elm_mee")) {
    criteria.push_back({"elm_mee", true, 0.0, cfg.get_double("elm_mee", "sigma"),
                        0.0, cfg.get_double_or("elm_mee", "lambda_prime", 0.0)});
  }
  if (cfg.has_section("elm_qmee")) {
    criteria.push_back({"elm_qmee", true, 0.0,
                        cfg.get_double("elm_qmee", "sigma"),
                        cfg.get_double("elm_qmee", "epsilon"),
                        cfg.get_double_or("elm_qmee", "lambda_prime", 0.0)});
  }
  if (criteria.empty()) {
    throw ConfigError(
        "no trainer sections found; add at least one of [elm] [relm] "
        "[elm_mee] [elm_qmee]");
  }

  ExperimentReport report;
  report.task = "elm";
  report.metric_name = "rmse";
  report.header = resolved.header("elm", "rmse");

  std::vector<std::vector<MetricRow>> results(static_cast<std::size_t>(trials));
  const auto body = [&](int trial) {
    const auto stream = static_cast<std::uint64_t>(trial);
    Eigen::MatrixXd train_x, test_x;
    Eigen::VectorXd train_t, test_t;
    if (from_csv) {
      // fresh random split per trial
      const Eigen::Index total = all_inputs.cols();
      std::vector<Eigen::Index> order(static_cast<std::size_t>(total));
      for (Eigen::Index i = 0; i < total; ++i) {
        order[static_cast<std::size_t>(i)] = i;
      }
      Philox4x64 rng(seed, 4 * stream);
      for (std::size_t i = order.size() - 1; i > 0; --i) {
        const auto j = static_cast<std::size_t>(rng.next_below(i + 1));
        std::swap(order[i], order[j]);
      }
      train_x.resize(all_inputs.rows(), n_train);
      train_t.resize(n_train);
      test_x.resize(all_inputs.rows(), n_test);
      test_t.resize(n_test);
      for (Eigen::Index i = 0; i < total; ++i) {
        const Eigen::Index src = order[static_cast<std::size_t>(i)];
        if (i < n_train) {
          train_x.col(i) = all_inputs.col(src);
          train_t[i] = all_targets[src];
        } else {
          test_x.col(i - n_train) = all_inputs.col(src);
          test_t[i - n_train] = all_targets[src];
        }
      }
      // normalize features and targets on training statistics
      const NormalizedPair features = minmax_normalize(train_x, test_x);
      train_x = features.train;
      test_x = features.test;
      const NormalizedPair targets =
          minmax_normalize(train_t.transpose(), test_t.transpose());
      train_t = targets.train.transpose();
      test_t = targets.test.transpose();
    } else {
      // 1-d sinc regression with impulsive noise on the training targets
      Philox4x64 rng(seed, 4 * stream);
      train_x.resize(1, n_train);
      train_t.resize(n_train);
      for (Eigen::Index i = 0; i < n_train; ++i) {
        const double x = rng.uniform(-10.0, 10.0);
        train_x(0, i) = x;
        const double clean = x == 0.0 ? 1.0 : std::sin(x) / x;
        train_t[i] = clean + noise_scale * sample_mixture_noise(noise, rng);
      }
      test_x.resize(1, n_test);
      test_t.resize(n_test);
      for (Eigen::Index i = 0; i < n_test; ++i) {
        const double x = rng.uniform(-10.0, 10.0);
        test_x(0, i) = x;
        test_t[i] = x == 0.0 ? 1.0 : std::sin(x) / x;
      }
      const NormalizedPair features = minmax_normalize(train_x, test_x);
      train_x = features.train;
      test_x = features.test;
    }

    Philox4x64 hidden_rng(seed, 4 * stream + 1);
    const auto [w, b] =
        init_hidden_layer(train_x.rows(), hidden_nodes, hidden_rng);
    const Eigen::MatrixXd h_train = hidden_map(w, b, train_x.transpose());
    const Eigen::MatrixXd h_test = hidden_map(w, b, test_x.transpose());

    auto& rows = results[static_cast<std::size_t>(trial)];
    for (const auto& setup : criteria) {
      MetricRow row;
      row.criterion = setup.name;
      row.trial = trial;
      try {
        const double start = now_seconds();
        Eigen::VectorXd beta;
        if (setup.entropy) {
          ElmTrainConfig train_config{KernelWidth(setup.sigma), setup.epsilon,
                                      setup.lambda_prime, iterations,
                                      tolerance};
          auto [solved, trace] = solve_elm_qmee(h_train, train_t, train_config);
          beta = std::move(solved);
          row.iterations = trace.iterations_used;
          row.converged = trace.converged;
        } else {
          beta = solve_relm(h_train, train_t, setup.lambda);
          row.converged = true;
        }
        row.wall_time_s = now_seconds() - start;
        Eigen::VectorXd predictions = h_test * beta;
        if (setup.entropy) {
          const Eigen::VectorXd train_errors = train_t - h_train * beta;
          predictions = debias_shift_invariant(train_errors, predictions);
        }
        row.metric = std::sqrt((test_t - predictions).squaredNorm() /
                               static_cast<double>(n_test));
      } catch (const SolverError& error) {
        row.failed = true;
        row.metric = std::nan("");
        row.note = error.what();
      }
      rows.push_back(std::move(row));
    }
  };
  parallel_indices(trials, thread_count(resolved.config()), body);
  for (auto& rows : results) {
    for (auto& row : rows) report.rows.push_back(std::move(row));
  }
  append_aggregates(report);
  return report;
}

ExperimentReport run_esn_experiment(const KeyValueConfig& config_in) {
  Resolved resolved(config_in);
  const auto trials = static_cast<int>(resolved.integer("", "trials", 10));
  const auto train_len = resolved.integer("", "train", 900);
  const auto test_len = resolved.integer("", "test", 400);
  const auto reservoir_size = resolved.integer("", "reservoir_size", 400);
  const double radius = resolved.num("", "spectral_radius", 0.95);
  const double sparsity = resolved.num("", "sparsity", 0.01);
  const auto washout = resolved.integer("", "washout", 50);
  const auto epochs = static_cast<int>(resolved.integer("", "epochs", 200));
  const double eta = resolved.num("", "eta", 1e-3);
  const double rho = resolved.num("", "rho", 0.9);
  const double rmsprop_r = resolved.num("", "rmsprop_r", 1e-6);
  const double occurrence = resolved.num("", "occurrence", 0.2);
  const double outlier_variance = resolved.num("", "outlier_variance", 0.01);
  const std::string init = resolved.str("", "init", "ridge");
  const double init_ridge = resolved.num("", "init_ridge", 1e-2);
  const std::uint64_t seed = resolved.seed();
  if (init != "ridge" && init != "zero") {
    throw ConfigError("init must be 'ridge' or 'zero'");
  }

  std::vector<double> alphas{0.2};
  if (resolved.config().has("", "alpha_list")) {
    alphas = resolved.config().get_double_list("", "alpha_list");
  } else {
    resolved.config().set("", "alpha_list", "0.2");
  }

  const auto& cfg = resolved.config();
  const bool run_ls = cfg.has_section("esn_ls");
  const bool run_ridge = cfg.has_section("esn_ridge");
  const bool run_qmee = cfg.has_section("esn_qmee");
  const bool run_mee = cfg.has_section("esn_mee");
  if (!run_ls && !run_ridge && !run_qmee && !run_mee) {
    throw ConfigError(
        "no reservoir trainer sections found; add at least one of [esn_ls] "
        "[esn_ridge] [esn_qmee] [esn_mee]");
  }
  const std::vector<double> ridge_lambdas =
      run_ridge ? cfg.get_double_list("esn_ridge", "lambda")
                : std::vector<double>{};
  const std::vector<double> qmee_sigmas =
      run_qmee ? cfg.get_double_list("esn_qmee", "sigma")
               : std::vector<double>{};
  const std::vector<double> qmee_epsilons =
      run_qmee ? cfg.get_double_list("esn_qmee", "epsilon")
               : std::vector<double>{};
  const std::vector<double> mee_sigmas =
      run_mee ? cfg.get_double_list("esn_mee", "sigma")
              : std::vector<double>{};

  // the chaotic series itself is parameter-free and shared by all trials
  const std::vector<double> raw = gen_mackey_glass(
      static_cast<std::size_t>(24 + train_len + test_len));

  ExperimentReport report;
  report.task = "esn";
  report.metric_name = "nrmse";
  report.header = resolved.header("esn", "nrmse");

  const int jobs = static_cast<int>(alphas.size()) * trials;
  std::vector<std::vector<MetricRow>> results(static_cast<std::size_t>(jobs));
  const auto body = [&](int job) {
    const auto alpha_index = static_cast<std::size_t>(job / trials);
    const int trial = job % trials;
    const double alpha = alphas[alpha_index];

    MixtureNoiseSpec noise;
    noise.occurrence_prob = occurrence;
    noise.background = BackgroundNoise::gauss_mix_alpha;
    noise.alpha = alpha;
    noise.outlier_variance = outlier_variance;

    const auto stream = static_cast<std::uint64_t>(job);
    const TimeSeriesDataset data = embed_and_split(
        raw, &noise, train_len, test_len, seed, 2 * stream);
    Philox4x64 reservoir_rng(seed, 2 * stream + 1);
    const EsnModel model = build_reservoir(4, reservoir_size, radius, sparsity,
                                           reservoir_rng);

    Eigen::MatrixXd inputs(4, train_len + test_len);
    inputs.leftCols(train_len) = data.train_inputs;
    inputs.rightCols(test_len) = data.test_inputs;
    const StateCollection states = run_reservoir(model, inputs, washout);
    const StateCollection train_states{states.states.leftCols(train_len),
                                       washout};
    const Eigen::MatrixXd test_phi = states.states.rightCols(test_len);
    const Eigen::MatrixXd train_targets = data.train_targets.transpose();

    auto& rows = results[static_cast<std::size_t>(job)];
    auto push = [&](const std::string& name, double metric, double wall,
                    int iters, bool converged, bool failed,
                    const std::string& note) {
      MetricRow row;
      row.criterion = name;
      row.param = alpha;
      row.has_param = true;
      row.trial = trial;
      row.metric = metric;
      row.wall_time_s = wall;
      row.iterations = iters;
      row.converged = converged;
      row.failed = failed;
      row.note = note;
      rows.push_back(std::move(row));
    };
    auto evaluate = [&](const Eigen::MatrixXd& w_out, bool debias) {
      Eigen::VectorXd predictions = (w_out * test_phi).transpose();
      if (debias) {
        const Eigen::VectorXd train_errors =
            (train_targets.rightCols(train_states.usable()) -
             w_out * train_states.usable_states())
                .transpose();
        predictions = debias_shift_invariant(train_errors, predictions);
      }
      return nrmse(data.test_targets, predictions);
    };

    Eigen::MatrixXd warm;  // ridge warm start shared by the entropy trainers
    if (init == "ridge") {
      warm = solve_esn_ls(train_states, train_targets, init_ridge);
    } else {
      warm = Eigen::MatrixXd::Zero(1, 4 + reservoir_size);
    }

    if (run_ls) {
      try {
        const double start = now_seconds();
        const Eigen::MatrixXd w = solve_esn_ls(train_states, train_targets, 0.0);
        const double wall = now_seconds() - start;
        push("esn_ls", evaluate(w, false), wall, 0, true, false, {});
      } catch (const SolverError& error) {
        push("esn_ls", std::nan(""), 0.0, 0, false, true, error.what());
      }
    }
    if (run_ridge) {
      const double lambda =
          list_value(ridge_lambdas, alpha_index, "[esn_ridge] lambda");
      try {
        const double start = now_seconds();
        const Eigen::MatrixXd w =
            solve_esn_ls(train_states, train_targets, lambda);
        const double wall = now_seconds() - start;
        push("esn_ridge", evaluate(w, false), wall, 0, true, false, {});
      } catch (const SolverError& error) {
        push("esn_ridge", std::nan(""), 0.0, 0, false, true, error.what());
      }
    }
    auto run_entropy = [&](const std::string& name, double sigma,
                           double epsilon) {
      try {
        RmsPropConfig rms{eta, rho, rmsprop_r, epochs, KernelWidth(sigma),
                          epsilon};
        const double start = now_seconds();
        auto [w, trace] = train_esn_qmee(train_states, train_targets, warm, rms);
        const double wall = now_seconds() - start;
        push(name, evaluate(w, true), wall, trace.iterations_used, true, false,
             {});
      } catch (const EsnDivergenceError& error) {
        push(name, std::nan(""), 0.0, error.epoch, false, true, error.what());
      } catch (const SolverError& error) {
        push(name, std::nan(""), 0.0, 0, false, true, error.what());
      }
    };
    if (run_qmee) {
      run_entropy("esn_qmee",
                  list_value(qmee_sigmas, alpha_index, "[esn_qmee] sigma"),
                  list_value(qmee_epsilons, alpha_index, "[esn_qmee] epsilon"));
    }
    if (run_mee) {
      run_entropy("esn_mee",
                  list_value(mee_sigmas, alpha_index, "[esn_mee] sigma"), 0.0);
    }
  };
  parallel_indices(jobs, thread_count(resolved.config()), body);
  for (auto& rows : results) {
    for (auto& row : rows) report.rows.push_back(std::move(row));
  }
  append_aggregates(report);
  return report;
}

TimingReport run_timing_sweep(const KeyValueConfig& config_in) {
  Resolved resolved(config_in);
  const double sigma = resolved.num("", "sigma", 1.0);
  const double epsilon = resolved.num("", "epsilon", 0.3);
  const auto repeats = static_cast<int>(resolved.integer("", "repeats", 3));
  const double min_time_ms = resolved.num("", "min_time_ms", 20.0);
  const std::uint64_t seed = resolved.seed();
  std::vector<double> n_list{500, 1000, 2000, 4000, 8000};
  if (resolved.config().has("", "n_list")) {
    n_list = resolved.config().get_double_list("", "n_list");
  } else {
    resolved.config().set("", "n_list", "500,1000,2000,4000,8000");
  }
  if (repeats < 1) throw ConfigError("repeats must be >= 1");

  TimingReport report;
  const KernelWidth width(sigma);

  // median time of one evaluation, measured over enough back-to-back calls
  // to pass the minimum-time floor
  const auto measured = [&](const std::function<double()>& evaluate) {
    std::vector<double> times;
    times.reserve(static_cast<std::size_t>(repeats));
    volatile double sink = 0.0;
    int loops = 1;
    for (;;) {
      const double start = now_seconds();
      for (int i = 0; i < loops; ++i) sink = evaluate();
      const double elapsed = now_seconds() - start;
      if (elapsed * 1e3 >= min_time_ms || loops >= (1 << 20)) break;
      loops *= 2;
    }
    for (int rep = 0; rep < repeats; ++rep) {
      const double start = now_seconds();
      for (int i = 0; i < loops; ++i) sink = evaluate();
      times.push_back((now_seconds() - start) / loops);
    }
    (void)sink;
    std::sort(times.begin(), times.end());
    return times[times.size() / 2];
  };

  std::size_t max_codebook = 0;
  for (std::size_t idx = 0; idx < n_list.size(); ++idx) {
    const auto n = static_cast<std::size_t>(n_list[idx]);
    Philox4x64 rng(seed, idx);
    std::vector<double> values(n);
    for (auto& v : values) v = rng.normal();
    const ErrorVector errors(values);

    report.rows.push_back(
        {"ip", n, measured([&] { return information_potential(errors, width); })});
    report.rows.push_back({"qmee", n, measured([&] {
                             const auto q = quantize_stream(errors, epsilon);
                             return qmee_potential(errors, q.codebook, width);
                           })});
    max_codebook = std::max(
        max_codebook, quantize_stream(errors, epsilon).codebook.size());
  }
  resolved.config().set("", "max_codebook_size", std::to_string(max_codebook));
  report.header = resolved.header("timing", "median_time_s");

  // log-log least-squares slope per criterion
  for (const std::string criterion : {"ip", "qmee"}) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int count = 0;
    for (const auto& row : report.rows) {
      if (row.criterion != criterion) continue;
      const double x = std::log(static_cast<double>(row.n));
      const double y = std::log(std::max(row.median_time_s, 1e-12));
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
      ++count;
    }
    if (count >= 2) {
      const double denom = count * sxx - sx * sx;
      if (denom > 0) {
        report.slopes[criterion] = (count * sxy - sx * sy) / denom;
      }
    }
  }
  return report;
}

SurfaceGrid run_surface_grid(const KeyValueConfig& config_in) {
  Resolved resolved(config_in);
  const auto n = resolved.integer("", "n", 200);
  const auto points = resolved.integer("", "grid_points", 101);
  const double w1_min = resolved.num("", "omega1_min", 0.0);
  const double w1_max = resolved.num("", "omega1_max", 4.0);
  const double w2_min = resolved.num("", "omega2_min", -1.0);
  const double w2_max = resolved.num("", "omega2_max", 3.0);
  const std::uint64_t seed = resolved.seed();
  const MixtureNoiseSpec spec = noise_case(resolved.str("", "noise_case", "case1"));
  const auto criteria = linreg_criteria(resolved);
  if (points < 2) throw ConfigError("grid_points must be >= 2");

  const RegressionDataset data = gen_linear_regression(n, spec, seed);
  if (data.inputs.rows() != 2) {
    throw ConfigError("surface task requires a two-weight problem");
  }

  SurfaceGrid grid;
  grid.header = resolved.header("surface", "cost");
  grid.target = {(*data.true_omega)[0], (*data.true_omega)[1]};
  grid.axis1.resize(static_cast<std::size_t>(points));
  grid.axis2.resize(static_cast<std::size_t>(points));
  for (Eigen::Index i = 0; i < points; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(points - 1);
    grid.axis1[static_cast<std::size_t>(i)] = w1_min + t * (w1_max - w1_min);
    grid.axis2[static_cast<std::size_t>(i)] = w2_min + t * (w2_max - w2_min);
  }

  const int threads = thread_count(resolved.config());
  for (const auto& criterion : criteria) {
    Eigen::MatrixXd values(points, points);
    const auto body = [&](int i) {
      Eigen::VectorXd omega(2);
      omega[0] = grid.axis1[static_cast<std::size_t>(i)];
      std::vector<double> errs(static_cast<std::size_t>(n));
      for (Eigen::Index j = 0; j < points; ++j) {
        omega[1] = grid.axis2[static_cast<std::size_t>(j)];
        Eigen::Map<Eigen::VectorXd>(errs.data(), n) =
            data.targets - data.inputs.transpose() * omega;
        const ErrorVector errors(errs);
        double value = 0.0;
        switch (criterion.kind) {
          case CriterionKind::mse:
            value = mse_cost(errors);
            break;
          case CriterionKind::mcc:
            value = correntropy_cost(errors, KernelWidth(criterion.sigma));
            break;
          case CriterionKind::mee:
            value = information_potential(errors, KernelWidth(criterion.sigma));
            break;
          case CriterionKind::qmee: {
            const auto q = quantize_stream(errors, criterion.epsilon);
            value = qmee_potential(errors, q.codebook,
                                   KernelWidth(criterion.sigma));
            break;
          }
        }
        values(i, j) = value;
      }
    };
    parallel_indices(static_cast<int>(points), threads, body);

    Eigen::Index best_i = 0, best_j = 0;
    if (criterion.kind == CriterionKind::mse) {
      values.minCoeff(&best_i, &best_j);
    } else {
      values.maxCoeff(&best_i, &best_j);
    }
    grid.best.emplace_back(criterion.name,
                           std::make_pair(grid.axis1[static_cast<std::size_t>(best_i)],
                                          grid.axis2[static_cast<std::size_t>(best_j)]));
    grid.values.emplace_back(criterion.name, std::move(values));
  }
  return grid;
}

std::vector<std::string> emit_report(const ExperimentReport& report,
                                     const std::string& out_dir) {
  if (report.rows.empty()) {
    throw std::invalid_argument("emit_report: report has no rows");
  }
  std::filesystem::create_directories(out_dir);
  const std::string path = out_dir + "/" + report.task + "_metrics.csv";
  write_metrics_csv(path, report);
  return {path};
}

std::vector<std::string> emit_report(const TimingReport& report,
                                     const std::string& out_dir) {
  if (report.rows.empty()) {
    throw std::invalid_argument("emit_report: report has no rows");
  }
  std::filesystem::create_directories(out_dir);
  const std::string csv = out_dir + "/timing.csv";
  const std::string svg = out_dir + "/timing.svg";
  write_timing_csv(csv, report);
  write_timing_svg(svg, report);
  return {csv, svg};
}

std::vector<std::string> emit_report(const SurfaceGrid& grid,
                                     const std::string& out_dir) {
  if (grid.values.empty()) {
    throw std::invalid_argument("emit_report: surface grid is empty");
  }
  std::filesystem::create_directories(out_dir);
  std::vector<std::string> paths;
  const std::string csv = out_dir + "/surface.csv";
  write_surface_csv(csv, grid);
  paths.push_back(csv);
  for (const auto& [criterion, values] : grid.values) {
    const std::string svg = out_dir + "/surface_" + criterion + ".svg";
    write_surface_svg(svg, grid, criterion);
    paths.push_back(svg);
  }
  return paths;
}

}  // namespace qmee::bench
