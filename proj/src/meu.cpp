#include "unfold/meu.hpp"

#include "unfold/error.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

namespace unfold::models {

namespace {

using Edges = std::vector<std::pair<Index, Index>>;

// Above this many edges the dense Newton system is too expensive.
constexpr Index kNewtonEdgeLimit = 4000;

Eigen::VectorXd edge_distances(const DataMatrix& Y, const Edges& edges) {
  Eigen::VectorXd d(static_cast<Index>(edges.size()));
  for (std::size_t e = 0; e < edges.size(); ++e) {
    d(static_cast<Index>(e)) = (Y.row(edges[e].first) - Y.row(edges[e].second)).squaredNorm();
  }
  return d;
}

Eigen::MatrixXd dense_precision(Index n, const Edges& edges, const Eigen::VectorXd& lambdas, double gamma) {
  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const auto [i, j] = edges[e];
    const double lam = lambdas(static_cast<Index>(e));
    P(i, j) -= lam;
    P(j, i) -= lam;
    P(i, i) += lam;
    P(j, j) += lam;
  }
  P.diagonal().array() += gamma;
  return P;
}

Eigen::VectorXd residual_from_covariance(const Eigen::MatrixXd& K, double p, const Edges& edges,
                                         const Eigen::VectorXd& d) {
  Eigen::VectorXd r(d.size());
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const auto [i, j] = edges[e];
    r(static_cast<Index>(e)) = p * (K(i, i) + K(j, j) - 2.0 * K(i, j)) - d(static_cast<Index>(e));
  }
  return r;
}

// Objective pieces at one multiplier vector. The constant -(np/2) log 2 pi is
// left out; it does not move the optimum.
struct Point {
  Eigen::VectorXd lambdas;
  double f = 0.0;
  Eigen::LLT<Eigen::MatrixXd> llt;
};

std::optional<Point> evaluate(Index n, double p, const Edges& edges, const Eigen::VectorXd& d,
                              double trace_yy, double gamma, Eigen::VectorXd lambdas) {
  if (!lambdas.allFinite()) return std::nullopt;
  Point pt;
  pt.llt.compute(dense_precision(n, edges, lambdas, gamma));
  if (pt.llt.info() != Eigen::Success) return std::nullopt;
  const double log_det = 2.0 * pt.llt.matrixLLT().diagonal().array().log().sum();
  if (!std::isfinite(log_det)) return std::nullopt;
  pt.f = 0.5 * p * log_det - 0.5 * lambdas.dot(d) - 0.5 * gamma * trace_yy;
  pt.lambdas = std::move(lambdas);
  return pt;
}

}  // namespace

Eigen::VectorXd meu_distance_residual(const DataMatrix& Y, const graphs::NeighborGraph& g,
                                      const Eigen::MatrixXd& covariance) {
  const auto edges = g.edges();
  return residual_from_covariance(covariance, static_cast<double>(Y.cols()), edges, edge_distances(Y, edges));
}

Eigen::VectorXd meu_gradient(const DataMatrix& Y, const graphs::NeighborGraph& g,
                             const Eigen::VectorXd& lambdas, double gamma) {
  const auto edges = g.edges();
  if (static_cast<Index>(edges.size()) != lambdas.size()) {
    throw InvalidArgument("meu_gradient: one multiplier per edge required");
  }
  Eigen::LLT<Eigen::MatrixXd> llt(dense_precision(g.size(), edges, lambdas, gamma));
  if (llt.info() != Eigen::Success) throw NumericalError("meu_gradient: precision is not positive definite");
  const Eigen::MatrixXd K = llt.solve(Eigen::MatrixXd::Identity(g.size(), g.size()));
  return 0.5 * residual_from_covariance(K, static_cast<double>(Y.cols()), edges, edge_distances(Y, edges));
}

GrfModel meu_fit(const DataMatrix& Y, const graphs::NeighborGraph& g, const MeuFitConfig& cfg) {
  const Index n = Y.rows();
  if (n < 2) throw InvalidArgument("meu_fit: need at least 2 points");
  if (Y.cols() < 1) throw InvalidArgument("meu_fit: need at least one feature");
  if (g.size() != n) throw InvalidArgument("meu_fit: graph does not match data");
  if (g.kind() != graphs::GraphKind::kUndirected) throw InvalidArgument("meu_fit: graph must be undirected");
  if (!(cfg.tol > 0.0) || cfg.max_iters < 1 || cfg.memory < 1) {
    throw InvalidArgument("meu_fit: tolerances and iteration limits must be positive");
  }
  if (cfg.gamma < 0.0) throw InvalidArgument("meu_fit: gamma must be nonnegative");
  const auto comps = g.components();
  if (comps.size() > 1) {
    throw DisconnectedGraph("meu_fit: neighborhood graph has " + std::to_string(comps.size()) +
                            " connected components");
  }

  const auto edges = g.edges();
  const Eigen::VectorXd d = edge_distances(Y, edges);
  const double p = static_cast<double>(Y.cols());
  const double trace_yy = Y.squaredNorm();
  const double d_mean = d.mean();
  const bool nonneg = cfg.constraint == ConstraintMode::kNonnegative;
  const double lambda0 = cfg.lambda_init > 0.0 ? cfg.lambda_init : (d_mean > 0.0 ? 1.0 / d_mean : 1.0);

  auto project = [&](Eigen::VectorXd v) {
    if (nonneg) v = v.cwiseMax(0.0);
    return v;
  };
  auto eval = [&](Eigen::VectorXd lambdas) {
    return evaluate(n, p, edges, d, trace_yy, cfg.gamma, std::move(lambdas));
  };
  auto ascent_direction = [&](const Point& pt) {
    const Eigen::MatrixXd K = pt.llt.solve(Eigen::MatrixXd::Identity(n, n));
    return residual_from_covariance(K, p, edges, d);  // 2 * gradient
  };
  auto kkt_violation = [&](const Point& pt, const Eigen::VectorXd& r) {
    double worst = 0.0;
    for (Index e = 0; e < r.size(); ++e) {
      const bool active = !nonneg || pt.lambdas(e) > 0.0;
      worst = std::max(worst, active ? std::abs(r(e)) : std::max(r(e), 0.0));
    }
    return d_mean > 0.0 ? worst / d_mean : std::numeric_limits<double>::infinity();
  };

  // Spectral projected gradient with a nonmonotone Armijo search.
  auto spectral_projected_gradient = [&](Point& x, Eigen::VectorXd& r, FitInfo& info) {
    r = ascent_direction(x);
    Eigen::VectorXd grad = 0.5 * r;

    std::deque<double> history{x.f};
    double alpha = lambda0 / std::max(grad.cwiseAbs().maxCoeff(), 1e-300);
    constexpr double kAlphaMin = 1e-30;
    constexpr double kAlphaMax = 1e30;

    int iter = 0;
    for (; iter < cfg.max_iters; ++iter) {
      info.kkt_violation = kkt_violation(x, r);
      if (info.kkt_violation <= cfg.tol) {
        info.converged = true;
        break;
      }

      const Eigen::VectorXd step = project(x.lambdas + alpha * grad) - x.lambdas;
      const double slope = grad.dot(step);
      if (!(slope > 0.0)) break;
      const double reference = *std::max_element(history.begin(), history.end());

      std::optional<Point> trial;
      double t = 1.0;
      while (t > 1e-20) {
        trial = eval(x.lambdas + t * step);
        if (trial && trial->f >= reference + cfg.armijo * t * slope) break;
        trial.reset();
        t *= 0.5;
      }
      if (!trial) break;

      const Eigen::VectorXd s = trial->lambdas - x.lambdas;
      x = std::move(*trial);
      r = ascent_direction(x);
      const Eigen::VectorXd new_grad = 0.5 * r;
      const double sy = -s.dot(new_grad - grad);  // curvature of the negated objective
      alpha = sy > 0.0 ? std::clamp(s.squaredNorm() / sy, kAlphaMin, kAlphaMax) : kAlphaMax;
      grad = new_grad;

      history.push_back(x.f);
      if (static_cast<int>(history.size()) > cfg.memory) history.pop_front();
    }
    return iter;
  };

  std::optional<Point> start = eval(project(Eigen::VectorXd::Constant(d.size(), lambda0)));
  if (!start && cfg.gamma == 0.0) {
    throw NumericalError("meu_fit: initial precision is singular; use gamma > 0");
  }
  if (!start) throw NumericalError("meu_fit: initial precision is not positive definite");
  Point x = std::move(*start);

  FitInfo info;
  info.converged = false;
  const bool newton = cfg.solver == MeuSolver::kNewton ||
                      (cfg.solver == MeuSolver::kAuto && d.size() <= kNewtonEdgeLimit);
  int iter = 0;
  Eigen::VectorXd r;
  if (newton) {
    // Projected Newton: multipliers pinned at zero with a pushing gradient are
    // held fixed, the rest take a Newton step, and the step is projected.
    for (; iter < cfg.max_iters; ++iter) {
      const Eigen::MatrixXd K = x.llt.solve(Eigen::MatrixXd::Identity(n, n));
      r = residual_from_covariance(K, p, edges, d);
      const Eigen::VectorXd grad = 0.5 * r;
      info.kkt_violation = kkt_violation(x, r);
      if (info.kkt_violation <= cfg.tol) {
        info.converged = true;
        break;
      }
      const double eps = std::min(1e-3 * lambda0, (project(x.lambdas + grad) - x.lambdas).norm());
      std::vector<Index> free;
      for (Index a = 0; a < d.size(); ++a) {
        if (!nonneg || x.lambdas(a) > eps || grad(a) > 0.0) free.push_back(a);
      }
      const auto m = static_cast<Index>(free.size());
      Eigen::MatrixXd H(m, m);  // negated Hessian on the free set
      for (Index b = 0; b < m; ++b) {
        const auto [k, l] = edges[static_cast<std::size_t>(free[b])];
        for (Index a = b; a < m; ++a) {
          const auto [i, j] = edges[static_cast<std::size_t>(free[a])];
          const double c = K(i, k) - K(i, l) - K(j, k) + K(j, l);
          H(a, b) = 0.5 * p * c * c;
        }
      }
      Eigen::VectorXd gf(m);
      for (Index a = 0; a < m; ++a) gf(a) = grad(free[a]);
      const double shift = 1e-12 * std::max(H.diagonal().maxCoeff(), 1e-300);
      Eigen::LLT<Eigen::MatrixXd> hll;
      for (double mu = shift; mu < 1e300; mu *= 100.0) {
        Eigen::MatrixXd Hm = H;
        Hm.diagonal().array() += mu;
        hll.compute(Hm);
        if (hll.info() == Eigen::Success) break;
      }
      Eigen::VectorXd dir = Eigen::VectorXd::Zero(d.size());
      if (hll.info() == Eigen::Success) {
        const Eigen::VectorXd df = hll.solve(gf);
        for (Index a = 0; a < m; ++a) dir(free[a]) = df(a);
      }

      std::optional<Point> trial;
      for (double t = 1.0; t > 1e-20; t *= 0.5) {
        Eigen::VectorXd cand = project(x.lambdas + t * dir);
        const double gain = grad.dot(cand - x.lambdas);
        if (!(gain > 0.0)) continue;
        trial = eval(std::move(cand));
        if (trial && trial->f >= x.f + cfg.armijo * gain) break;
        trial.reset();
      }
      if (!trial) {
        // Newton step unusable; fall back to a projected gradient step.
        const double scale = lambda0 / std::max(grad.cwiseAbs().maxCoeff(), 1e-300);
        for (double t = scale; t > 1e-20 * scale; t *= 0.5) {
          Eigen::VectorXd cand = project(x.lambdas + t * grad);
          const double gain = grad.dot(cand - x.lambdas);
          if (!(gain > 0.0)) break;
          trial = eval(std::move(cand));
          if (trial && trial->f >= x.f + cfg.armijo * gain) break;
          trial.reset();
        }
      }
      if (!trial) break;
      x = std::move(*trial);
    }
    if (!info.converged) r = ascent_direction(x);
  } else {
    iter = spectral_projected_gradient(x, r, info);
  }
  info.iterations = iter;
  if (!info.converged) {
    info.kkt_violation = kkt_violation(x, r);
    info.converged = info.kkt_violation <= cfg.tol;
  }
  if (!info.converged) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", info.kkt_violation);
    info.warnings.push_back("meu_fit: stopped after " + std::to_string(iter) +
                            " iterations with relative KKT violation " + buf);
  }

  graphs::Laplacian L = graphs::laplacian_from_edge_values(g, x.lambdas);
  const double ll = x.f - 0.5 * static_cast<double>(n) * p * std::log(2.0 * std::numbers::pi);
  GrfModel model(std::move(L), cfg.gamma, Y.cols(), ll);
  model.info = std::move(info);
  return model;
}

Embedding meu_embed(const GrfModel& model, Index q) {
  Embedding out = grf_embed(model, q);
  out.method = "meu";
  return out;
}

}  // namespace unfold::models
