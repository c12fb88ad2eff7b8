#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace qmee::bench {

/// One trial of one method. Aggregate rows repeat the criterion with
/// trial = -1, aggregate = true, metric = mean and metric_std = standard
/// deviation over the non-failed trials.
struct MetricRow {
  std::string criterion;
  double param = 0.0;  ///< task-dependent (alpha for the reservoir sweep)
  bool has_param = false;
  int trial = -1;
  bool aggregate = false;
  double metric = 0.0;
  double metric_std = 0.0;  ///< aggregate rows only
  double wall_time_s = 0.0;
  int iterations = 0;
  bool converged = false;
  bool failed = false;
  std::string note;
};

struct ExperimentReport {
  std::string task;
  std::string metric_name;  ///< "rmse" or "nrmse"
  std::vector<std::pair<std::string, std::string>> header;
  std::vector<MetricRow> rows;
};

/// Appends one aggregate row per (criterion, param) group, preserving first
/// appearance order. Mean/std are over non-failed trial rows; wall time and
/// iterations are averaged the same way.
void append_aggregates(ExperimentReport& report);

void write_metrics_csv(const std::string& path, const ExperimentReport& report);
ExperimentReport read_metrics_csv(const std::string& path);

struct TimingRow {
  std::string criterion;
  std::size_t n = 0;
  double median_time_s = 0.0;
};

struct TimingReport {
  std::vector<std::pair<std::string, std::string>> header;
  std::vector<TimingRow> rows;
  /// criterion -> fitted log-log slope; absent when fewer than two sizes.
  std::map<std::string, double> slopes;
};

void write_timing_csv(const std::string& path, const TimingReport& report);
TimingReport read_timing_csv(const std::string& path);

struct SurfaceGrid {
  std::vector<double> axis1;  ///< first weight coordinate
  std::vector<double> axis2;  ///< second weight coordinate
  /// criterion -> axis1.size() x axis2.size() cost values
  std::vector<std::pair<std::string, Eigen::MatrixXd>> values;
  /// criterion -> grid optimizer (argmin for mse, argmax otherwise)
  std::vector<std::pair<std::string, std::pair<double, double>>> best;
  std::pair<double, double> target{0.0, 0.0};
  std::vector<std::pair<std::string, std::string>> header;
};

void write_surface_csv(const std::string& path, const SurfaceGrid& grid);

/// Formats a double so that reading it back reproduces the exact value.
std::string format_double(double value);

}  // namespace qmee::bench
