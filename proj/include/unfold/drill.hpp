#pragma once

#include "unfold/graphs.hpp"
#include "unfold/grf.hpp"
#include "unfold/types.hpp"

#include <vector>

namespace unfold::models {

/// L1-penalized GRF precision over data points.
///
/// The fit maximizes (p/2) log det T - 1/2 tr(S T) - rho sum_{i<j} |t_ij| with
/// S = Y Y^T. Internally it solves the equivalent canonical problem
///   log det T - tr(S' T) - rho' sum_{i != j} |t_ij|,  S' = S/p, rho' = rho/p,
/// whose objective is 2/p times the one above.
struct DrillOptions {
  double rho = 0.0;
  /// Restrict the nonzero off-diagonal entries to the edges of this graph.
  const graphs::NeighborGraph* pattern = nullptr;
  /// Subtract the per-feature mean over points before forming S.
  bool center = true;
  /// Ridge added to S' as a multiple of mean(diag S'). Needed when S' is
  /// singular (p < n or centered data).
  double floor = 0.0;
  double tol = 1e-6;  // duality gap, canonical units
  int max_sweeps = 2000;
};

struct DrillFit {
  Eigen::MatrixXd theta;  // fitted precision
  GrfModel model;         // theta as Laplacian + diagonal remainder
  int sweeps = 0;
  double duality_gap = 0.0;
  /// -log det W - n after each sweep: the negated dual objective, which the
  /// block updates never increase.
  std::vector<double> dual_trace;
};

double canonical_rho(double rho, Index p);
double raw_rho(double canonical, Index p);

/// Second-moment matrix S = Y Y^T (centered per feature when asked).
Eigen::MatrixXd second_moment(const DataMatrix& Y, bool center);

/// (p/2) log det T - (np/2) log 2 pi - 1/2 tr(S T) - rho sum_{i<j} |t_ij|.
double drill_objective(const Eigen::MatrixXd& S, const Eigen::MatrixXd& theta, double rho, Index p);

/// log det T - tr(S' T) - rho' sum_{i != j} |t_ij|.
double canonical_objective(const Eigen::MatrixXd& S_canonical, const Eigen::MatrixXd& theta, double rho_canonical);

/// Graphical lasso by block coordinate descent with an unpenalized diagonal.
/// Throws NumericalError if S' plus floor is not PD enough to start or if
/// the duality gap is still above tol after max_sweeps.
DrillFit drill_fit(const DataMatrix& Y, const DrillOptions& opts = {});

/// grf_embed of the fitted model, tagged "drill".
Embedding drill_embed(const DrillFit& fit, Index q);

}  // namespace unfold::models
