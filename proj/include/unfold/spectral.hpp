#pragma once

#include "unfold/types.hpp"

#include <Eigen/Core>

namespace unfold::spectral {

/// Matrices up to this size use the dense eigensolver; larger ones use
/// Lanczos on the few extremal pairs that are needed.
inline constexpr Index kDenseEigenLimit = 2048;

/// d_ij = |y_i - y_j|^2, diagonal exactly zero.
SquaredDistanceMatrix squared_distances(const DataMatrix& Y);

/// H K H with H = I - 11^T/n.
SimilarityMatrix center(const SimilarityMatrix& K);

/// B = -1/2 H D H.
SimilarityMatrix distances_to_similarities(const SquaredDistanceMatrix& D);

/// Eigenpairs with values ascending; vectors are columns.
struct EigenPairs {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;
};

/// Full symmetric eigendecomposition. Throws InvalidArgument if A is not
/// symmetric and NumericalError if the solver fails.
EigenPairs sym_eig(const Eigen::MatrixXd& A);

/// L u = lambda D u with D = diag(d), d > 0. Vectors are D-orthonormal.
EigenPairs gen_eig(const Eigen::MatrixXd& L, const Eigen::VectorXd& d);

/// Flip each column so its first entry of non-negligible magnitude is
/// positive.
void fix_signs(Eigen::MatrixXd& V);

/// Classical scaling: top-q eigenvectors of B scaled by sqrt(max(ev, 0)).
Embedding cmds_embed(const SimilarityMatrix& B, Index q, Index dense_limit = kDenseEigenLimit);

/// <d_ij> = p (k_ii - 2 k_ij + k_jj) for a field with covariance K and p
/// independent features.
SquaredDistanceMatrix expected_squared_distances(const SimilarityMatrix& K, double p);

enum class KernelKind { kLinear, kRbf };

struct Kernel {
  KernelKind kind = KernelKind::kLinear;
  double gamma = 1.0;  // rbf: exp(-gamma |y - y'|^2)
};

Embedding kernel_pca(const DataMatrix& Y, const Kernel& kernel, Index q,
                     Index dense_limit = kDenseEigenLimit);

}  // namespace unfold::spectral
