#pragma once

#include "unfold/graphs.hpp"
#include "unfold/grf.hpp"
#include "unfold/types.hpp"

#include <string>
#include <vector>

namespace unfold::models {

/// Per-point reconstruction weights. Point i is approximated by
/// sum_j w_j y_j over j in neighbors[i]; the weights of each point sum to one.
struct LleWeights {
  Index n = 0;
  std::vector<std::vector<Index>> neighbors;
  std::vector<Eigen::VectorXd> weights;
  /// m_ii; 1 for standard LLE.
  Eigen::VectorXd precision;

  /// Column i is m_ii (e_i - sum_j w_j e_j).
  graphs::FactorMatrix factor(bool lower_triangular = false) const;
};

/// Solves (C_i + ridge tr(C_i)/|N(i)| I) w = 1 per point and normalizes.
/// A point whose neighbors all coincide with it gets uniform weights.
/// With ridge = 0 a singular C_i throws NumericalError.
LleWeights lle_weights(const DataMatrix& Y, const graphs::NeighborGraph& g, double ridge = 1e-6);

/// Eigenvectors of M M^T for the 2nd..(q+1)th smallest eigenvalues, unit
/// norm. Stored eigenvalues are negated (spectrum_sign = -1).
Embedding lle_embed(const LleWeights& w, Index q, Index dense_limit = 2048);

struct AlleOptions {
  double eps_last = 1e-3;
  /// Divide the squared residual by p (per-feature variance). The alternative
  /// uses the total squared residual.
  bool per_feature_variance = true;
  double ridge = 1e-6;
  double residual_floor = 1e-12;
};

/// Acyclic LLE fit. `factor` and `weights` live in the relabeled index space
/// of the graph (row r is original point order[r]); `model` is expressed in
/// the original indexing.
struct AlleFit {
  graphs::FactorMatrix factor;
  LleWeights weights;
  std::vector<Index> order;
  GrfModel model;
  double log_likelihood = 0.0;
  std::vector<std::string> warnings;
};

AlleFit alle_fit(const DataMatrix& Y, const graphs::NeighborGraph& g, const AlleOptions& opts = {});

/// grf_embed of the fitted model, tagged "alle"; rows in original order.
Embedding alle_embed(const AlleFit& fit, Index q);

/// Rows of Y permuted so that row r is Y.row(order[r]). Empty order is identity.
DataMatrix relabel_rows(const DataMatrix& Y, const std::vector<Index>& order);

/// sum_i [ (p/2) log(m_ii^2 / 2 pi) - 1/2 |Y^T m_i|^2 ], the product of the
/// per-point conditional densities. Throws InvalidArgument if some m_ii = 0.
double pseudo_log_likelihood(const DataMatrix& Y, const graphs::FactorMatrix& M);

}  // namespace unfold::models
