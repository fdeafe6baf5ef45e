#include "unfold/drill.hpp"

#include "unfold/error.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

namespace unfold::models {

namespace {

double soft_threshold(double x, double t) {
  if (x > t) return x - t;
  if (x < -t) return x + t;
  return 0.0;
}

std::optional<double> log_det(const Eigen::MatrixXd& A) {
  Eigen::LLT<Eigen::MatrixXd> llt(A);
  if (llt.info() != Eigen::Success) return std::nullopt;
  const double v = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
  if (!std::isfinite(v)) return std::nullopt;
  return v;
}

// argmin 1/2 b^T W b - s^T b + rho |b|_1 for PD W. Coordinate descent,
// finished by an exact solve on the nonzero set once the signs settle.
Eigen::VectorXd lasso(const Eigen::MatrixXd& W, const Eigen::VectorXd& s, double rho, Eigen::VectorXd beta) {
  const Index m = s.size();
  if (rho == 0.0) {
    Eigen::LLT<Eigen::MatrixXd> llt(W);
    if (llt.info() != Eigen::Success) throw NumericalError("drill_fit: working covariance lost positive definiteness");
    return llt.solve(s);
  }
  const double scale = std::max(W.diagonal().maxCoeff(), 1e-300);
  Eigen::VectorXd u = W * beta;
  for (int pass = 1; pass <= 100000; ++pass) {
    double biggest = 0.0;
    for (Index k = 0; k < m; ++k) {
      const double r = s(k) - (u(k) - W(k, k) * beta(k));
      const double updated = soft_threshold(r, rho) / W(k, k);
      const double delta = updated - beta(k);
      if (delta != 0.0) {
        u.noalias() += delta * W.col(k);
        beta(k) = updated;
        biggest = std::max(biggest, std::abs(delta) * W(k, k));
      }
    }
    if (pass % 5 != 0 && biggest > 1e-14 * scale) continue;

    std::vector<Index> nz;
    for (Index k = 0; k < m; ++k) {
      if (beta(k) != 0.0) nz.push_back(k);
    }
    const auto f = static_cast<Index>(nz.size());
    Eigen::VectorXd exact = Eigen::VectorXd::Zero(m);
    bool consistent = true;
    if (f > 0) {
      Eigen::MatrixXd Wf(f, f);
      Eigen::VectorXd rhs(f);
      for (Index a = 0; a < f; ++a) {
        rhs(a) = s(nz[a]) - rho * (beta(nz[a]) > 0.0 ? 1.0 : -1.0);
        for (Index b = 0; b < f; ++b) Wf(a, b) = W(nz[a], nz[b]);
      }
      Eigen::LLT<Eigen::MatrixXd> llt(Wf);
      consistent = llt.info() == Eigen::Success;
      if (consistent) {
        const Eigen::VectorXd sol = llt.solve(rhs);
        for (Index a = 0; a < f; ++a) {
          if ((sol(a) > 0.0) != (beta(nz[a]) > 0.0) || sol(a) == 0.0) consistent = false;
          exact(nz[a]) = sol(a);
        }
      }
    }
    if (consistent) {
      const Eigen::VectorXd grad = s - W * exact;
      for (Index k = 0; k < m && consistent; ++k) {
        if (exact(k) == 0.0 && std::abs(grad(k)) > rho * (1.0 + 1e-10)) consistent = false;
      }
    }
    if (consistent) return exact;
    if (biggest <= 1e-14 * scale) break;
  }
  return beta;
}

double off_diagonal_l1(const Eigen::MatrixXd& T) {
  return T.cwiseAbs().sum() - T.diagonal().cwiseAbs().sum();
}

}  // namespace

double canonical_rho(double rho, Index p) { return rho / static_cast<double>(p); }
double raw_rho(double canonical, Index p) { return canonical * static_cast<double>(p); }

Eigen::MatrixXd second_moment(const DataMatrix& Y, bool center) {
  if (!center) return Y * Y.transpose();
  const DataMatrix Yc = Y.rowwise() - Y.colwise().mean();
  return Yc * Yc.transpose();
}

double drill_objective(const Eigen::MatrixXd& S, const Eigen::MatrixXd& theta, double rho, Index p) {
  const auto ld = log_det(theta);
  if (!ld) throw NumericalError("drill_objective: precision is not positive definite");
  const double n = static_cast<double>(S.rows());
  const double pd = static_cast<double>(p);
  return 0.5 * pd * *ld - 0.5 * n * pd * std::log(2.0 * std::numbers::pi) -
         0.5 * S.cwiseProduct(theta).sum() - rho * 0.5 * off_diagonal_l1(theta);
}

double canonical_objective(const Eigen::MatrixXd& S_canonical, const Eigen::MatrixXd& theta, double rho_canonical) {
  const auto ld = log_det(theta);
  if (!ld) throw NumericalError("canonical_objective: precision is not positive definite");
  return *ld - S_canonical.cwiseProduct(theta).sum() - rho_canonical * off_diagonal_l1(theta);
}

DrillFit drill_fit(const DataMatrix& Y, const DrillOptions& opts) {
  const Index n = Y.rows();
  const Index p = Y.cols();
  if (n < 2 || p < 1) throw InvalidArgument("drill_fit: need at least 2 points and 1 feature");
  if (opts.rho < 0.0) throw InvalidArgument("drill_fit: rho must be nonnegative");
  if (opts.floor < 0.0) throw InvalidArgument("drill_fit: floor must be nonnegative");
  if (!(opts.tol > 0.0) || opts.max_sweeps < 1) throw InvalidArgument("drill_fit: bad convergence settings");
  if (opts.pattern) {
    if (opts.pattern->size() != n) throw InvalidArgument("drill_fit: pattern does not match data");
    if (opts.pattern->kind() != graphs::GraphKind::kUndirected) {
      throw InvalidArgument("drill_fit: pattern must be undirected");
    }
  }

  Eigen::MatrixXd S = second_moment(Y, opts.center) / static_cast<double>(p);
  S = (0.5 * (S + S.transpose())).eval();
  if (opts.floor > 0.0) S.diagonal().array() += opts.floor * S.diagonal().mean();
  for (Index i = 0; i < n; ++i) {
    if (!(S(i, i) > 0.0)) {
      throw NumericalError("drill_fit: second moment of point " + std::to_string(i) +
                           " is zero; raise the floor");
    }
  }
  const double rho = canonical_rho(opts.rho, p);

  // allowed(i, j): the entry may be nonzero.
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> allowed(n, n);
  allowed.setConstant(opts.pattern == nullptr);
  if (opts.pattern) {
    for (const auto& [i, j] : opts.pattern->edges()) allowed(i, j) = allowed(j, i) = true;
  }
  for (Index i = 0; i < n; ++i) allowed(i, i) = false;

  std::vector<std::vector<Index>> free_sets(static_cast<std::size_t>(n));
  for (Index j = 0; j < n; ++j) {
    for (Index k = 0; k < n; ++k) {
      if (allowed(k, j)) free_sets[static_cast<std::size_t>(j)].push_back(k);
    }
  }

  Eigen::MatrixXd W = S;
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(n, n);  // column j: regression of j on the rest, B(j, j) = 0

  DrillFit fit;
  Eigen::MatrixXd theta(n, n);
  auto precision_from_blocks = [&] {
    for (Index j = 0; j < n; ++j) {
      const double denom = W(j, j) - W.col(j).dot(B.col(j));
      const double tjj = 1.0 / denom;
      theta.col(j) = -tjj * B.col(j);
      theta(j, j) = tjj;
    }
    theta = (0.5 * (theta + theta.transpose())).eval();
  };

  for (int sweep = 1; sweep <= opts.max_sweeps; ++sweep) {
    for (Index j = 0; j < n; ++j) {
      const auto& A = free_sets[static_cast<std::size_t>(j)];
      const auto m = static_cast<Index>(A.size());
      Eigen::VectorXd beta(m);
      if (m > 0) {
        Eigen::MatrixXd Wa(m, m);
        Eigen::VectorXd sa(m);
        for (Index a = 0; a < m; ++a) {
          sa(a) = S(A[static_cast<std::size_t>(a)], j);
          beta(a) = B(A[static_cast<std::size_t>(a)], j);
          for (Index b = 0; b < m; ++b) Wa(a, b) = W(A[static_cast<std::size_t>(a)], A[static_cast<std::size_t>(b)]);
        }
        beta = lasso(Wa, sa, rho, beta);
      }
      B.col(j).setZero();
      for (Index a = 0; a < m; ++a) B(A[static_cast<std::size_t>(a)], j) = beta(a);
      Eigen::VectorXd u = Eigen::VectorXd::Zero(n);
      for (Index a = 0; a < m; ++a) {
        if (beta(a) != 0.0) u.noalias() += beta(a) * W.col(A[static_cast<std::size_t>(a)]);
      }
      for (Index k = 0; k < n; ++k) {
        if (k == j) continue;
        W(k, j) = u(k);
        W(j, k) = u(k);
      }
    }

    const auto ld_w = log_det(W);
    fit.dual_trace.push_back(ld_w ? -*ld_w - static_cast<double>(n) : std::numeric_limits<double>::infinity());
    if (!ld_w) continue;
    precision_from_blocks();
    const auto ld_t = log_det(theta);
    if (!ld_t) continue;
    double penalty = 0.0;
    for (Index j = 0; j < n; ++j) {
      for (Index i = 0; i < n; ++i) {
        if (allowed(i, j)) penalty += rho * std::abs(theta(i, j));
      }
    }
    const double primal = -*ld_t + S.cwiseProduct(theta).sum() + penalty;
    const double dual = *ld_w + static_cast<double>(n);
    fit.duality_gap = primal - dual;
    fit.sweeps = sweep;
    if (fit.duality_gap <= opts.tol) break;
  }
  if (fit.sweeps == 0 || fit.duality_gap > opts.tol) {
    char gap[32];
    std::snprintf(gap, sizeof gap, "%.3g", fit.duality_gap);
    throw NumericalError("drill_fit: no convergence after " + std::to_string(opts.max_sweeps) + " sweeps (duality gap " +
                         (fit.sweeps == 0 ? std::string("undefined") : std::string(gap)) + ")");
  }

  // Zero the entries the pattern forbids, then express theta as a Laplacian
  // plus a diagonal remainder.
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < n; ++i) {
      if (i != j && !allowed(i, j)) theta(i, j) = 0.0;
    }
  }
  fit.theta = theta;
  std::vector<graphs::EdgeMultiplier> multipliers;
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < j; ++i) {
      if (theta(i, j) != 0.0) multipliers.push_back({i, j, -theta(i, j)});
    }
  }
  std::sort(multipliers.begin(), multipliers.end(), [](const auto& a, const auto& b) {
    return a.i < b.i || (a.i == b.i && a.j < b.j);
  });
  Eigen::VectorXd ldiag = Eigen::VectorXd::Zero(n);
  for (const auto& e : multipliers) {
    ldiag(e.i) += e.value;
    ldiag(e.j) += e.value;
  }
  const Eigen::VectorXd extra = theta.diagonal() - ldiag;
  const Eigen::MatrixXd S_raw = second_moment(Y, opts.center);
  const double ll = drill_objective(S_raw, theta, 0.0, p);
  fit.model = GrfModel(graphs::Laplacian(n, std::move(multipliers), std::move(ldiag)), 0.0, p, ll, extra);
  return fit;
}

Embedding drill_embed(const DrillFit& fit, Index q) {
  Embedding out = grf_embed(fit.model, q);
  out.method = "drill";
  return out;
}

}  // namespace unfold::models
