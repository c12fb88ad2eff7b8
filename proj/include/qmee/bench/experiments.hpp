#pragma once

#include <string>

#include "qmee/bench/config.hpp"
#include "qmee/bench/report.hpp"

namespace qmee::bench {

/// Monte Carlo linear regression under the configured criteria; one row per
/// (criterion, trial) with the weight-space RMSE and the training wall time.
ExperimentReport run_linreg_experiment(const KeyValueConfig& config);

/// Synthetic (or CSV-backed) regression with the random-hidden-layer network;
/// test-set RMSE per criterion and trial, entropy criteria debiased.
ExperimentReport run_elm_experiment(const KeyValueConfig& config);

/// Reservoir-network sweep over the impulsive-noise amplitude alpha;
/// test NRMSE per algorithm, alpha and trial.
ExperimentReport run_esn_experiment(const KeyValueConfig& config);

/// Median evaluation time of the exact and the quantized potential across
/// sample sizes, with fitted log-log slopes.
TimingReport run_timing_sweep(const KeyValueConfig& config);

/// Criterion cost surfaces over a two-weight lattice on a fixed dataset.
SurfaceGrid run_surface_grid(const KeyValueConfig& config);

/// Writes the files for one finished experiment into out_dir and returns the
/// paths written. CSV always; SVG for the timing and surface tasks.
std::vector<std::string> emit_report(const ExperimentReport& report,
                                     const std::string& out_dir);
std::vector<std::string> emit_report(const TimingReport& report,
                                     const std::string& out_dir);
std::vector<std::string> emit_report(const SurfaceGrid& grid,
                                     const std::string& out_dir);

}  // namespace qmee::bench
