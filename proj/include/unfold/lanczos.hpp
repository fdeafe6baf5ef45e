#pragma once

#include "unfold/spectral.hpp"

#include <Eigen/Core>

#include <functional>

namespace unfold::spectral {

/// y = A x for a symmetric operator A.
using LinearOperator = std::function<void(const Eigen::VectorXd& x, Eigen::VectorXd& y)>;

enum class Which { kLargest, kSmallest };

struct LanczosOptions {
  double tol = 1e-10;               // residual bound relative to the spectral radius estimate
  unsigned long long seed = 12345;  // start vector
};

/// `count` extremal eigenpairs of an n x n symmetric operator by Lanczos with
/// full reorthogonalization. The Krylov space grows until every wanted Ritz
/// pair has converged or it spans the whole space. Values come back ascending.
EigenPairs lanczos(const LinearOperator& apply, Index n, Index count, Which which,
                   const LanczosOptions& opts = {});

}  // namespace unfold::spectral
