#include "unfold/lanczos.hpp"

#include "unfold/error.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <random>

namespace unfold::spectral {

namespace {

Eigen::VectorXd random_unit(Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd v(n);
  for (Index i = 0; i < n; ++i) v(i) = normal(rng);
  return v.normalized();
}

// Two passes of classical Gram-Schmidt against the first m columns of Q.
void orthogonalize(const Eigen::MatrixXd& Q, Index m, Eigen::VectorXd& w) {
  for (int pass = 0; pass < 2; ++pass) {
    w.noalias() -= Q.leftCols(m) * (Q.leftCols(m).transpose() * w);
  }
}

}  // namespace

EigenPairs lanczos(const LinearOperator& apply, Index n, Index count, Which which,
                   const LanczosOptions& opts) {
  if (n < 1) throw InvalidArgument("lanczos: empty operator");
  if (count < 1 || count > n) throw InvalidArgument("lanczos: requested pair count out of range");

  std::mt19937_64 rng(opts.seed);
  Eigen::MatrixXd Q(n, std::min<Index>(n, 64));
  Eigen::VectorXd alpha(Q.cols());
  Eigen::VectorXd beta(Q.cols());  // beta(j) couples columns j and j+1
  Q.col(0) = random_unit(n, rng);

  Eigen::VectorXd w(n);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri;
  Index m = 0;
  double scale = 0.0;
  while (true) {
    apply(Q.col(m), w);
    alpha(m) = Q.col(m).dot(w);
    orthogonalize(Q, m + 1, w);
    const double b = w.norm();
    ++m;
    scale = std::max(scale, std::abs(alpha(m - 1)) + b);

    const bool exhausted = (m == n);
    const bool check = exhausted || (m >= count && (m % 5 == 0 || b <= 1e-14 * scale));
    if (check) {
      Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m, m);
      for (Index j = 0; j < m; ++j) {
        T(j, j) = alpha(j);
        if (j + 1 < m) T(j, j + 1) = T(j + 1, j) = beta(j);
      }
      tri.compute(T);
      if (tri.info() != Eigen::Success) throw NumericalError("lanczos: tridiagonal eigensolve failed");
      bool converged = true;
      for (Index r = 0; r < count && !exhausted; ++r) {
        const Index col = which == Which::kLargest ? m - 1 - r : r;
        if (std::abs(b * tri.eigenvectors()(m - 1, col)) > opts.tol * scale) converged = false;
      }
      if (converged || exhausted) {
        const Index first = which == Which::kLargest ? m - count : 0;
        EigenPairs out;
        out.values = tri.eigenvalues().segment(first, count);
        out.vectors = Q.leftCols(m) * tri.eigenvectors().middleCols(first, count);
        for (Index c = 0; c < count; ++c) out.vectors.col(c).normalize();
        return out;
      }
    }

    if (m == Q.cols()) {
      const Index grow = std::min<Index>(n, 2 * Q.cols());
      Q.conservativeResize(Eigen::NoChange, grow);
      alpha.conservativeResize(grow);
      beta.conservativeResize(grow);
    }
    if (b <= 1e-14 * scale) {
      // Invariant subspace found; continue from a fresh orthogonal direction.
      Eigen::VectorXd v = random_unit(n, rng);
      orthogonalize(Q, m, v);
      Q.col(m) = v.normalized();
      beta(m - 1) = 0.0;
    } else {
      Q.col(m) = w / b;
      beta(m - 1) = b;
    }
  }
}

}  // namespace unfold::spectral
