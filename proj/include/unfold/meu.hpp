#pragma once

#include "unfold/graphs.hpp"
#include "unfold/grf.hpp"
#include "unfold/types.hpp"

namespace unfold::models {

enum class ConstraintMode {
  kNonnegative,  // attractive network, lambda >= 0
  kFree,         // unconstrained sign; non-PD points are rejected by the line search
};

enum class MeuSolver {
  kAuto,    // Newton up to a few thousand edges, SPG beyond
  kNewton,  // projected Newton on the multipliers
  kSpg,     // spectral projected gradient
};

struct MeuFitConfig {
  int max_iters = 5000;
  /// KKT tolerance relative to the mean observed squared edge distance.
  double tol = 1e-4;
  /// Starting multiplier; <= 0 selects 1 / mean(d_ij) over edges.
  double lambda_init = 0.0;
  double gamma = 1e-4;
  ConstraintMode constraint = ConstraintMode::kNonnegative;
  MeuSolver solver = MeuSolver::kAuto;
  /// SPG line-search memory; sufficient-increase constant for both solvers.
  int memory = 10;
  double armijo = 1e-4;
};

/// Edge values of (<d_ij> - d_ij) for the given model, in g.edges() order.
/// The log-likelihood gradient with respect to lambda_ij is half of this.
Eigen::VectorXd meu_distance_residual(const DataMatrix& Y, const graphs::NeighborGraph& g,
                                      const Eigen::MatrixXd& covariance);

/// Gradient of meu_log_likelihood with respect to the edge multipliers
/// (g.edges() order) at the given values.
Eigen::VectorXd meu_gradient(const DataMatrix& Y, const graphs::NeighborGraph& g,
                             const Eigen::VectorXd& lambdas, double gamma);

/// Maximum-likelihood edge multipliers by projected ascent (see MeuSolver).
/// Hitting max_iters is reported through model.info, not thrown.
GrfModel meu_fit(const DataMatrix& Y, const graphs::NeighborGraph& g, const MeuFitConfig& cfg = {});

/// grf_embed tagged "meu".
Embedding meu_embed(const GrfModel& model, Index q);

}  // namespace unfold::models
