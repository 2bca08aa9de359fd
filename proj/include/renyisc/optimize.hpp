#pragma once

// Small dense quasi-Newton minimizer used by the optimized Renyi quantities
// and by the randomness-extraction merit.

#include <Eigen/Dense>

#include <functional>

namespace renyisc {

struct BfgsOptions {
  double gradient_tolerance = 1e-9;
  double value_tolerance = 1e-12;
  int max_iterations = 10000;
};

struct BfgsResult {
  Eigen::VectorXd x;
  double value = 0.0;
  double gradient_norm = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Objective returns f(x) and writes the gradient into `grad` when non-null.
using Objective = std::function<double(const Eigen::VectorXd& x, Eigen::VectorXd* grad)>;

/// BFGS with Armijo backtracking. `renormalize` (optional) is applied to the
/// iterate after each accepted step; returning true resets the curvature model.
BfgsResult bfgs_minimize(const Objective& f, Eigen::VectorXd x0, const BfgsOptions& options = {},
                         const std::function<bool(Eigen::VectorXd&)>& renormalize = {});

}  // namespace renyisc
