#pragma once

#include <Eigen/Core>

#include <functional>

namespace unfold::optim {

/// f(x), writing the gradient into g.
using Objective = std::function<double(const Eigen::VectorXd& x, Eigen::VectorXd& g)>;

struct LbfgsOptions {
  int memory = 8;
  int max_iters = 200;
  double pgtol = 1e-6;   // projected-gradient infinity norm
  double ftol = 1e-10;   // relative decrease
  double armijo = 1e-4;
};

struct LbfgsResult {
  Eigen::VectorXd x;
  double f = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Minimizes f over the box [lower, upper] with a projected limited-memory
/// BFGS step on the free variables and projected backtracking. A non-finite
/// f at a trial point counts as a failed step.
LbfgsResult minimize_box(const Objective& f, Eigen::VectorXd x0, const Eigen::VectorXd& lower,
                         const Eigen::VectorXd& upper, const LbfgsOptions& opts = {});

}  // namespace unfold::optim
