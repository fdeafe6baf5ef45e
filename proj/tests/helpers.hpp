#pragma once

#include <Eigen/Core>

#include <random>

namespace unfold::testing {

// Standard normal n x p matrix from a seeded generator.
inline Eigen::MatrixXd gaussian(Eigen::Index n, Eigen::Index p, unsigned long long seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Eigen::MatrixXd Y(n, p);
  for (Eigen::Index j = 0; j < p; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) Y(i, j) = normal(rng);
  }
  return Y;
}

inline double max_rel(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return (a - b).cwiseAbs().maxCoeff() / std::max(1.0, b.cwiseAbs().maxCoeff());
}

}  // namespace unfold::testing
