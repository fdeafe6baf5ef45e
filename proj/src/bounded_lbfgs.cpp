#include "unfold/bounded_lbfgs.hpp"

#include "unfold/error.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <vector>

namespace unfold::optim {

namespace {

Eigen::VectorXd project(const Eigen::VectorXd& x, const Eigen::VectorXd& lo, const Eigen::VectorXd& hi) {
  return x.cwiseMax(lo).cwiseMin(hi);
}

}  // namespace

LbfgsResult minimize_box(const Objective& f, Eigen::VectorXd x0, const Eigen::VectorXd& lower,
                         const Eigen::VectorXd& upper, const LbfgsOptions& opts) {
  const Eigen::Index n = x0.size();
  if (lower.size() != n || upper.size() != n) throw InvalidArgument("minimize_box: bound sizes differ");
  if ((lower.array() > upper.array()).any()) throw InvalidArgument("minimize_box: lower bound above upper");

  LbfgsResult res;
  res.x = project(x0, lower, upper);
  Eigen::VectorXd g(n);
  res.f = f(res.x, g);
  if (!std::isfinite(res.f)) throw NumericalError("minimize_box: objective is not finite at the start");

  std::deque<Eigen::VectorXd> S;
  std::deque<Eigen::VectorXd> Ycurv;
  for (res.iterations = 0; res.iterations < opts.max_iters; ++res.iterations) {
    const Eigen::VectorXd pg = project(res.x - g, lower, upper) - res.x;
    if (pg.cwiseAbs().maxCoeff() <= opts.pgtol) {
      res.converged = true;
      break;
    }

    // Variables pinned at a bound with the gradient pushing outward stay fixed.
    Eigen::VectorXd free = Eigen::VectorXd::Ones(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      if ((res.x(i) <= lower(i) && g(i) > 0.0) || (res.x(i) >= upper(i) && g(i) < 0.0)) free(i) = 0.0;
    }

    // Two-loop recursion on the free subspace.
    Eigen::VectorXd q = g.cwiseProduct(free);
    const std::size_t m = S.size();
    std::vector<double> alpha(m);
    for (std::size_t k = m; k-- > 0;) {
      const double rho = 1.0 / Ycurv[k].dot(S[k]);
      alpha[k] = rho * S[k].dot(q);
      q -= alpha[k] * Ycurv[k].cwiseProduct(free);
    }
    if (m > 0) q *= S.back().dot(Ycurv.back()) / Ycurv.back().squaredNorm();
    for (std::size_t k = 0; k < m; ++k) {
      const double rho = 1.0 / Ycurv[k].dot(S[k]);
      const double beta = rho * Ycurv[k].dot(q);
      q += (alpha[k] - beta) * S[k].cwiseProduct(free);
    }
    Eigen::VectorXd d = -q.cwiseProduct(free);
    if (!(g.dot(d) < 0.0)) {
      S.clear();
      Ycurv.clear();
      d = -g.cwiseProduct(free);
    }
    if (m == 0) {
      // First step: move at most one unit in the largest coordinate.
      const double big = d.cwiseAbs().maxCoeff();
      if (big > 1.0) d /= big;
    }

    double t = 1.0;
    Eigen::VectorXd xt;
    Eigen::VectorXd gt(n);
    double ft = 0.0;
    bool accepted = false;
    for (int tries = 0; tries < 60; ++tries) {
      xt = project(res.x + t * d, lower, upper);
      ft = f(xt, gt);
      if (std::isfinite(ft) && ft <= res.f + opts.armijo * g.dot(xt - res.x)) {
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) break;

    const Eigen::VectorXd s = xt - res.x;
    const Eigen::VectorXd y = gt - g;
    const double decrease = res.f - ft;
    res.x = xt;
    g = gt;
    const double f_old = res.f;
    res.f = ft;
    if (s.dot(y) > 1e-12 * y.squaredNorm()) {
      S.push_back(s);
      Ycurv.push_back(y);
      if (static_cast<int>(S.size()) > opts.memory) {
        S.pop_front();
        Ycurv.pop_front();
      }
    }
    if (decrease <= opts.ftol * std::max({std::abs(f_old), std::abs(ft), 1.0})) {
      res.converged = true;
      ++res.iterations;
      break;
    }
  }
  return res;
}

}  // namespace unfold::optim
