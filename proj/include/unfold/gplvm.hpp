#pragma once

#include "unfold/types.hpp"

#include <Eigen/Core>

namespace unfold::eval {

/// Kernel variance * exp(-|x - x'|^2 / (2 l^2)) + bias + noise * delta.
/// Hyperparameters are optimized in log space inside fixed boxes; the inputs
/// are rescaled by their RMS first so the boxes do not depend on the units
/// of the embedding.
struct GplvmScoreConfig {
  int restarts = 5;
  unsigned long long seed = 0;
  double noise_floor = 1e-6;
  int max_iters = 200;
};

struct GplvmScore {
  double value = 0.0;  // optimized log marginal likelihood
  /// variance, lengthscale (in rescaled input units), bias, noise.
  Eigen::Vector4d hyper = Eigen::Vector4d::Zero();
  /// X had no spread; the score used the bias + noise kernel only.
  bool degenerate = false;
};

/// Zero mean and unit variance per column; constant columns become zero.
DataMatrix standardize(const DataMatrix& Y);

/// Log marginal likelihood of the columns of Ys (already standardized)
/// under the kernel on X with hyperparameters (variance, lengthscale, bias,
/// noise). Throws NumericalError if the kernel matrix is not PD.
double gp_log_marginal(const DataMatrix& Ys, const Eigen::MatrixXd& X, const Eigen::Vector4d& hyper);

/// Best log marginal likelihood over the restarts. Y is standardized
/// internally.
GplvmScore gplvm_score(const DataMatrix& Y, const Eigen::MatrixXd& X, const GplvmScoreConfig& cfg = {});

}  // namespace unfold::eval
