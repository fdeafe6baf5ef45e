#pragma once

#include <Eigen/Core>

#include <limits>
#include <string>
#include <vector>

namespace unfold {

using Index = Eigen::Index;

/// n x p design matrix; row i is data point i.
using DataMatrix = Eigen::MatrixXd;

/// Dense symmetric n x n matrices. The aliases document intent only.
using SquaredDistanceMatrix = Eigen::MatrixXd;
using SimilarityMatrix = Eigen::MatrixXd;

/// How the stored eigenvalues of an Embedding relate to the solved problem.
///
/// CMDS-style methods keep the top eigenvalues of a similarity matrix
/// (descending). Laplacian-style methods keep the smallest non-trivial
/// eigenvalues of a Laplacian; those are stored negated so the stored vector
/// is still descending, and `spectrum_sign` is -1.
struct EmbeddingDiagnostics {
  /// Sum of eigenvalues that were not retained (similarity convention).
  double discarded_mass = 0.0;
  /// Sum of |eigenvalue| over negative eigenvalues of the similarity matrix.
  /// NaN when the solver did not compute the full spectrum.
  double negative_mass = 0.0;
};

struct Embedding {
  Eigen::MatrixXd X;                  // n x q
  Eigen::VectorXd eigenvalues;        // q values, descending
  int spectrum_sign = 1;              // -1 for Laplacian-style methods
  std::string method;
  EmbeddingDiagnostics diagnostics;
  /// Original row index of each row of X. Empty means identity. Isomap fills
  /// this when it restricts to the largest connected component.
  std::vector<Index> index_map;
  std::vector<std::string> warnings;

  Index rows() const { return X.rows(); }
  Index dims() const { return X.cols(); }
};

}  // namespace unfold
