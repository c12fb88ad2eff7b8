#include "qmee/bench/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace qmee::bench {
namespace {

constexpr const char* kMetricsColumns =
    "criterion,param,trial,aggregate,metric,metric_std,wall_time_s,iterations,"
    "converged,failed,note";

void write_header(std::ofstream& out,
                  const std::vector<std::pair<std::string, std::string>>& header) {
  for (const auto& [key, value] : header) {
    out << "# " << key << " = " << value << '\n';
  }
}

std::vector<std::string> split_csv_row(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

double parse_double(const std::string& s) {
  if (s.empty()) return 0.0;
  if (s == "nan") return std::nan("");
  return std::stod(s);
}

}  // namespace

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

void append_aggregates(ExperimentReport& report) {
  struct Key {
    std::string criterion;
    double param;
    bool has_param;
    bool operator==(const Key&) const = default;
  };
  std::vector<Key> group_order;
  auto group_of = [&](const MetricRow& row) {
    return Key{row.criterion, row.param, row.has_param};
  };
  for (const auto& row : report.rows) {
    if (row.aggregate) continue;
    const Key key = group_of(row);
    bool seen = false;
    for (const auto& g : group_order) {
      if (g == key) {
        seen = true;
        break;
      }
    }
    if (!seen) group_order.push_back(key);
  }
  for (const auto& group : group_order) {
    double sum = 0.0, sum_sq = 0.0, time_sum = 0.0;
    double iter_sum = 0.0;
    int count = 0;
    for (const auto& row : report.rows) {
      if (row.aggregate || row.failed || !(group_of(row) == group)) continue;
      sum += row.metric;
      sum_sq += row.metric * row.metric;
      time_sum += row.wall_time_s;
      iter_sum += row.iterations;
      ++count;
    }
    MetricRow agg;
    agg.criterion = group.criterion;
    agg.param = group.param;
    agg.has_param = group.has_param;
    agg.aggregate = true;
    if (count > 0) {
      const double mean = sum / count;
      const double variance = std::max(0.0, sum_sq / count - mean * mean);
      agg.metric = mean;
      agg.metric_std = std::sqrt(variance);
      agg.wall_time_s = time_sum / count;
      agg.iterations = static_cast<int>(std::lround(iter_sum / count));
      agg.converged = true;
    } else {
      agg.metric = std::nan("");
      agg.metric_std = std::nan("");
      agg.failed = true;
      agg.note = "all trials failed";
    }
    report.rows.push_back(std::move(agg));
  }
}

void write_metrics_csv(const std::string& path, const ExperimentReport& report) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot open report file for writing: " + path);
  }
  write_header(out, report.header);
  out << kMetricsColumns << '\n';
  for (const auto& row : report.rows) {
    out << row.criterion << ',';
    if (row.has_param) out << format_double(row.param);
    out << ',' << row.trial << ',' << (row.aggregate ? 1 : 0) << ','
        << format_double(row.metric) << ','
        << (row.aggregate ? format_double(row.metric_std) : std::string()) << ','
        << format_double(row.wall_time_s) << ',' << row.iterations << ','
        << (row.converged ? 1 : 0) << ',' << (row.failed ? 1 : 0) << ','
        << row.note << '\n';
  }
  if (!out.good()) {
    throw std::runtime_error("report write failed: " + path);
  }
}

ExperimentReport read_metrics_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open report file: " + path);
  }
  ExperimentReport report;
  std::string line;
  bool saw_columns = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.front() == '#') {
      const auto eq = line.find('=');
      if (eq != std::string::npos) {
        std::string key = line.substr(1, eq - 1);
        std::string value = line.substr(eq + 1);
        while (!key.empty() && key.front() == ' ') key.erase(key.begin());
        while (!key.empty() && key.back() == ' ') key.pop_back();
        while (!value.empty() && value.front() == ' ') value.erase(value.begin());
        report.header.emplace_back(key, value);
        if (key == "task") report.task = value;
        if (key == "metric") report.metric_name = value;
      }
      continue;
    }
    if (!saw_columns) {
      if (line != kMetricsColumns) {
        throw std::runtime_error("unexpected column header in " + path);
      }
      saw_columns = true;
      continue;
    }
    auto cells = split_csv_row(line);
    if (cells.size() != 11) {
      throw std::runtime_error("bad metrics row in " + path + ": " + line);
    }
    MetricRow row;
    row.criterion = cells[0];
    row.has_param = !cells[1].empty();
    row.param = row.has_param ? parse_double(cells[1]) : 0.0;
    row.trial = static_cast<int>(std::stol(cells[2]));
    row.aggregate = cells[3] == "1";
    row.metric = parse_double(cells[4]);
    row.metric_std = cells[5].empty() ? 0.0 : parse_double(cells[5]);
    row.wall_time_s = parse_double(cells[6]);
    row.iterations = static_cast<int>(std::stol(cells[7]));
    row.converged = cells[8] == "1";
    row.failed = cells[9] == "1";
    row.note = cells[10];
    report.rows.push_back(std::move(row));
  }
  return report;
}

void write_timing_csv(const std::string& path, const TimingReport& report) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot open report file for writing: " + path);
  }
  write_header(out, report.header);
  out << "criterion,n,median_time_s,loglog_slope\n";
  for (const auto& row : report.rows) {
    out << row.criterion << ',' << row.n << ','
        << format_double(row.median_time_s) << ",\n";
  }
  for (const auto& [criterion, slope] : report.slopes) {
    out << criterion << ",,," << format_double(slope) << '\n';
  }
  if (!out.good()) {
    throw std::runtime_error("report write failed: " + path);
  }
}

TimingReport read_timing_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open report file: " + path);
  }
  TimingReport report;
  std::string line;
  bool saw_columns = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.front() == '#') {
      const auto eq = line.find('=');
      if (eq != std::string::npos) {
        std::string key = line.substr(1, eq - 1);
        std::string value = line.substr(eq + 1);
        while (!key.empty() && key.front() == ' ') key.erase(key.begin());
        while (!key.empty() && key.back() == ' ') key.pop_back();
        while (!value.empty() && value.front() == ' ') value.erase(value.begin());
        report.header.emplace_back(key, value);
      }
      continue;
    }
    if (!saw_columns) {
      saw_columns = true;
      continue;
    }
    auto cells = split_csv_row(line);
    if (cells.size() != 4) {
      throw std::runtime_error("bad timing row in " + path + ": " + line);
    }
    if (!cells[3].empty()) {
      report.slopes[cells[0]] = parse_double(cells[3]);
    } else {
      report.rows.push_back(
          {cells[0], static_cast<std::size_t>(std::stoull(cells[1])),
           parse_double(cells[2])});
    }
  }
  return report;
}

void write_surface_csv(const std::string& path, const SurfaceGrid& grid) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot open report file for writing: " + path);
  }
  write_header(out, grid.header);
  out << "# target = " << format_double(grid.target.first) << ' '
      << format_double(grid.target.second) << '\n';
  for (const auto& [criterion, point] : grid.best) {
    out << "# best." << criterion << " = " << format_double(point.first) << ' '
        << format_double(point.second) << '\n';
  }
  out << "criterion,omega1,omega2,value\n";
  for (const auto& [criterion, values] : grid.values) {
    for (std::size_t i = 0; i < grid.axis1.size(); ++i) {
      for (std::size_t j = 0; j < grid.axis2.size(); ++j) {
        out << criterion << ',' << format_double(grid.axis1[i]) << ','
            << format_double(grid.axis2[j]) << ','
            << format_double(values(static_cast<Eigen::Index>(i),
                                    static_cast<Eigen::Index>(j)))
            << '\n';
      }
    }
  }
  if (!out.good()) {
    throw std::runtime_error("report write failed: " + path);
  }
}

}  // namespace qmee::bench
