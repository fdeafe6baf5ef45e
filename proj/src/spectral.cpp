#include "unfold/spectral.hpp"

#include "unfold/error.hpp"
#include "unfold/lanczos.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace unfold::spectral {

namespace {

void require_square(const Eigen::MatrixXd& A, const char* what) {
  if (A.rows() != A.cols()) throw InvalidArgument(std::string(what) + ": matrix is not square");
}

void require_symmetric(const Eigen::MatrixXd& A, const char* what) {
  require_square(A, what);
  const double scale = std::max(1.0, A.cwiseAbs().maxCoeff());
  if ((A - A.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
    throw InvalidArgument(std::string(what) + ": matrix is not symmetric");
  }
}

}  // namespace

SquaredDistanceMatrix squared_distances(const DataMatrix& Y) {
  const Eigen::VectorXd norms = Y.rowwise().squaredNorm();
  SquaredDistanceMatrix D = (-2.0 * Y * Y.transpose()).eval();
  D.colwise() += norms;
  D.rowwise() += norms.transpose();
  D = (0.5 * (D + D.transpose())).cwiseMax(0.0).eval();
  D.diagonal().setZero();
  return D;
}

SimilarityMatrix center(const SimilarityMatrix& K) {
  require_square(K, "center");
  SimilarityMatrix B = K;
  B.rowwise() -= B.colwise().mean();
  B.colwise() -= B.rowwise().mean();
  return B;
}

SimilarityMatrix distances_to_similarities(const SquaredDistanceMatrix& D) {
  SimilarityMatrix B = -0.5 * center(D);
  return 0.5 * (B + B.transpose());
}

EigenPairs sym_eig(const Eigen::MatrixXd& A) {
  require_symmetric(A, "sym_eig");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(A);
  if (solver.info() != Eigen::Success) throw NumericalError("sym_eig: eigensolver did not converge");
  return {solver.eigenvalues(), solver.eigenvectors()};
}

EigenPairs gen_eig(const Eigen::MatrixXd& L, const Eigen::VectorXd& d) {
  require_symmetric(L, "gen_eig");
  if (d.size() != L.rows()) throw InvalidArgument("gen_eig: degree vector has wrong size");
  for (Index i = 0; i < d.size(); ++i) {
    if (!(d(i) > 0.0)) {
      throw InvalidArgument("gen_eig: nonpositive degree at point " + std::to_string(i));
    }
  }
  const Eigen::MatrixXd Dm = d.asDiagonal();
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> solver(L, Dm, Eigen::ComputeEigenvectors | Eigen::Ax_lBx);
  if (solver.info() != Eigen::Success) throw NumericalError("gen_eig: eigensolver did not converge");
  return {solver.eigenvalues(), solver.eigenvectors()};
}

void fix_signs(Eigen::MatrixXd& V) {
  for (Index c = 0; c < V.cols(); ++c) {
    const double peak = V.col(c).cwiseAbs().maxCoeff();
    for (Index r = 0; r < V.rows(); ++r) {
      if (std::abs(V(r, c)) > 1e-8 * peak) {
        if (V(r, c) < 0.0) V.col(c) *= -1.0;
        break;
      }
    }
  }
}

Embedding cmds_embed(const SimilarityMatrix& B, Index q, Index dense_limit) {
  require_symmetric(B, "cmds_embed");
  const Index n = B.rows();
  if (q < 1 || q > n - 1) {
    throw InvalidArgument("cmds_embed: q=" + std::to_string(q) + " outside [1, " + std::to_string(n - 1) + "]");
  }

  Embedding out;
  out.method = "cmds";
  Eigen::VectorXd values(q);
  Eigen::MatrixXd vectors(n, q);
  if (n <= dense_limit) {
    const EigenPairs all = sym_eig(B);
    for (Index c = 0; c < q; ++c) {
      values(c) = all.values(n - 1 - c);
      vectors.col(c) = all.vectors.col(n - 1 - c);
    }
    double discarded = 0.0;
    double negative = 0.0;
    for (Index i = 0; i < n - q; ++i) {
      discarded += all.values(i);
      if (all.values(i) < 0.0) negative -= all.values(i);
    }
    out.diagnostics.discarded_mass = discarded;
    out.diagnostics.negative_mass = negative;
  } else {
    const EigenPairs top = lanczos([&](const Eigen::VectorXd& x, Eigen::VectorXd& y) { y.noalias() = B * x; },
                                   n, q, Which::kLargest);
    for (Index c = 0; c < q; ++c) {
      values(c) = top.values(q - 1 - c);
      vectors.col(c) = top.vectors.col(q - 1 - c);
    }
    out.diagnostics.discarded_mass = B.trace() - values.sum();
    out.diagnostics.negative_mass = std::numeric_limits<double>::quiet_NaN();
  }
  fix_signs(vectors);
  out.X = vectors * values.cwiseMax(0.0).cwiseSqrt().asDiagonal();
  out.eigenvalues = values;
  return out;
}

SquaredDistanceMatrix expected_squared_distances(const SimilarityMatrix& K, double p) {
  require_square(K, "expected_squared_distances");
  const Eigen::VectorXd diag = K.diagonal();
  SquaredDistanceMatrix D = -2.0 * K;
  D.colwise() += diag;
  D.rowwise() += diag.transpose();
  D *= p;
  D = (0.5 * (D + D.transpose())).eval();
  D.diagonal().setZero();
  return D;
}

Embedding kernel_pca(const DataMatrix& Y, const Kernel& kernel, Index q, Index dense_limit) {
  SimilarityMatrix K;
  switch (kernel.kind) {
    case KernelKind::kLinear:
      K = Y * Y.transpose();
      break;
    case KernelKind::kRbf:
      if (!(kernel.gamma > 0.0)) throw InvalidArgument("kernel_pca: rbf gamma must be positive");
      K = (-kernel.gamma * squared_distances(Y)).array().exp().matrix();
      break;
  }
  Embedding out = cmds_embed(center(K), q, dense_limit);
  out.method = kernel.kind == KernelKind::kLinear ? "pca" : "kpca";
  return out;
}

}  // namespace unfold::spectral
