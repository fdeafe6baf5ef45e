#pragma once

#include "unfold/graphs.hpp"
#include "unfold/types.hpp"

namespace unfold::models {

struct LaplacianEigenmapsOptions {
  bool weighted = false;  // heat-kernel weights instead of unit weights
  double sigma = 0.0;     // heat-kernel width, required when weighted
  bool normalized = true; // L u = lambda D u; false solves L u = lambda u
  Index dense_limit = 2048;
};

/// D^{-1/2} L D^{-1/2}. Throws InvalidArgument on an isolated point.
Eigen::MatrixXd normalized_laplacian(const graphs::WeightedAdjacency& A);

/// Drops the constant eigenvector and keeps the next q. Eigenvalues are
/// stored negated (spectrum_sign = -1). Throws DisconnectedGraph listing the
/// components when g is not connected.
Embedding laplacian_eigenmaps(const DataMatrix& Y, const graphs::NeighborGraph& g, Index q,
                              const LaplacianEigenmapsOptions& opts = {});

}  // namespace unfold::models
