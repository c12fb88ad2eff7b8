#pragma once

#include <Eigen/Dense>

#include <vector>

namespace qmee {

/// Per-iteration record shared by the iterative trainers. snapshots[k] is the
/// weight vector after k updates (snapshots[0] is the initial point) and
/// costs[k] is the training objective evaluated at it.
struct TrainTrace {
  std::vector<Eigen::VectorXd> snapshots;
  std::vector<double> costs;
  int iterations_used = 0;
  bool converged = false;
};

}  // namespace qmee
