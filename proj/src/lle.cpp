#include "unfold/lle.hpp"

#include "unfold/error.hpp"
#include "unfold/lanczos.hpp"
#include "unfold/parallel.hpp"
#include "unfold/spectral.hpp"

#include <Eigen/Cholesky>
#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <string>

namespace unfold::models {

namespace {

// Normalized weights reconstructing y_i from its neighbors.
Eigen::VectorXd local_weights(const DataMatrix& Y, Index i, const std::vector<Index>& nbrs, double ridge) {
  const auto k = static_cast<Index>(nbrs.size());
  Eigen::MatrixXd Z(k, Y.cols());
  for (Index a = 0; a < k; ++a) Z.row(a) = Y.row(nbrs[static_cast<std::size_t>(a)]) - Y.row(i);
  Eigen::MatrixXd C = Z * Z.transpose();
  const double trace = C.trace();
  if (trace == 0.0) return Eigen::VectorXd::Constant(k, 1.0 / static_cast<double>(k));

  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(k);
  Eigen::VectorXd w;
  if (ridge > 0.0) {
    C.diagonal().array() += ridge * trace / static_cast<double>(k);
    Eigen::LDLT<Eigen::MatrixXd> ldlt(C);
    if (ldlt.info() != Eigen::Success) throw NumericalError("lle_weights: local system failed at point " + std::to_string(i));
    w = ldlt.solve(ones);
  } else {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(C);
    if (qr.rank() < k) {
      throw NumericalError("lle_weights: local covariance of point " + std::to_string(i) +
                           " is singular; use a nonzero ridge");
    }
    w = qr.solve(ones);
  }
  const double total = w.sum();
  if (!std::isfinite(total) || total == 0.0) {
    throw NumericalError("lle_weights: weights for point " + std::to_string(i) + " cannot be normalized");
  }
  return w / total;
}

LleWeights solve_weights(const DataMatrix& Y, const graphs::NeighborGraph& g, double ridge) {
  if (ridge < 0.0) throw InvalidArgument("ridge must be nonnegative");
  if (g.size() != Y.rows()) throw InvalidArgument("graph does not match data");
  LleWeights out;
  out.n = g.size();
  out.neighbors = g.all_neighbors();
  out.weights.resize(static_cast<std::size_t>(out.n));
  out.precision = Eigen::VectorXd::Ones(out.n);
  parallel_for(static_cast<std::size_t>(out.n), [&](std::size_t i) {
    const auto& nbrs = out.neighbors[i];
    if (nbrs.empty()) return;
    out.weights[i] = local_weights(Y, static_cast<Index>(i), nbrs, ridge);
  });
  return out;
}

}  // namespace

graphs::FactorMatrix LleWeights::factor(bool lower_triangular) const {
  std::vector<Eigen::Triplet<double>> triplets;
  for (Index i = 0; i < n; ++i) {
    const double m = precision(i);
    triplets.emplace_back(i, i, m);
    const auto& nbrs = neighbors[static_cast<std::size_t>(i)];
    const auto& w = weights[static_cast<std::size_t>(i)];
    for (std::size_t a = 0; a < nbrs.size(); ++a) triplets.emplace_back(nbrs[a], i, -m * w(static_cast<Index>(a)));
  }
  graphs::FactorMatrix M;
  M.n = n;
  M.m.resize(n, n);
  M.m.setFromTriplets(triplets.begin(), triplets.end());
  M.lower_triangular = lower_triangular;
  return M;
}

LleWeights lle_weights(const DataMatrix& Y, const graphs::NeighborGraph& g, double ridge) {
  if (g.kind() != graphs::GraphKind::kUndirected) throw InvalidArgument("lle_weights: graph must be undirected");
  for (Index i = 0; i < g.size(); ++i) {
    if (g.neighbors(i).empty()) throw InvalidArgument("lle_weights: point " + std::to_string(i) + " has no neighbors");
  }
  return solve_weights(Y, g, ridge);
}

Embedding lle_embed(const LleWeights& w, Index q, Index dense_limit) {
  const Index n = w.n;
  if (q < 1 || q >= n - 1) {
    throw InvalidArgument("lle_embed: q=" + std::to_string(q) + " must satisfy 1 <= q < n-1");
  }
  const Eigen::SparseMatrix<double> M = w.factor().m;
  const Eigen::SparseMatrix<double> Mt = M.transpose();
  const Eigen::SparseMatrix<double> A = M * Mt;

  // The constant vector is an exact null vector, but with more neighbors
  // than dimensions other eigenvalues sit near zero too and a solver mixes
  // them. Adding shift * 11^T / n moves the constant to the top of the
  // spectrum, so the q smallest pairs are taken from its complement.
  double shift = 1.0;
  for (Index i = 0; i < n; ++i) shift += A.coeff(i, i);
  spectral::EigenPairs pairs;
  if (n <= dense_limit) {
    Eigen::MatrixXd Ad(A);
    Ad.array() += shift / static_cast<double>(n);
    pairs = spectral::sym_eig(Ad);
  } else {
    pairs = spectral::lanczos(
        [&](const Eigen::VectorXd& x, Eigen::VectorXd& y) {
          y.noalias() = A * x;
          y.array() += shift * x.mean();
        },
        n, q, spectral::Which::kSmallest);
  }
  Embedding out;
  out.method = "lle";
  out.spectrum_sign = -1;
  out.X = pairs.vectors.leftCols(q);
  for (Index c = 0; c < q; ++c) out.X.col(c).normalize();
  spectral::fix_signs(out.X);
  out.eigenvalues = -pairs.values.head(q);
  if (pairs.values.size() == n) out.diagnostics.discarded_mass = pairs.values.segment(q, n - q - 1).sum();
  return out;
}

DataMatrix relabel_rows(const DataMatrix& Y, const std::vector<Index>& order) {
  if (order.empty()) return Y;
  DataMatrix out(Y.rows(), Y.cols());
  for (Index r = 0; r < Y.rows(); ++r) out.row(r) = Y.row(order[static_cast<std::size_t>(r)]);
  return out;
}

AlleFit alle_fit(const DataMatrix& Y, const graphs::NeighborGraph& g, const AlleOptions& opts) {
  if (g.kind() != graphs::GraphKind::kAcyclic) throw InvalidArgument("alle_fit: graph must be acyclic");
  if (g.size() != Y.rows()) throw InvalidArgument("alle_fit: graph does not match data");
  if (!(opts.eps_last > 0.0)) throw InvalidArgument("alle_fit: eps_last must be positive");
  if (!(opts.residual_floor > 0.0)) throw InvalidArgument("alle_fit: residual floor must be positive");
  const Index n = g.size();
  const double p = static_cast<double>(Y.cols());

  AlleFit fit;
  fit.order = g.order();
  if (fit.order.empty()) {
    fit.order.resize(static_cast<std::size_t>(n));
    for (Index r = 0; r < n; ++r) fit.order[static_cast<std::size_t>(r)] = r;
  }
  const DataMatrix Yr = relabel_rows(Y, fit.order);
  fit.weights = solve_weights(Yr, g, opts.ridge);

  Index floored = 0;
  for (Index i = 0; i < n; ++i) {
    const auto& nbrs = fit.weights.neighbors[static_cast<std::size_t>(i)];
    if (nbrs.empty()) {
      // Only the last point lacks parents in a graph built with k >= 1.
      if (i != n - 1) throw InvalidArgument("alle_fit: point " + std::to_string(i) + " has no parents");
      fit.weights.precision(i) = opts.eps_last;
      continue;
    }
    Eigen::RowVectorXd residual = Yr.row(i);
    const auto& w = fit.weights.weights[static_cast<std::size_t>(i)];
    for (std::size_t a = 0; a < nbrs.size(); ++a) residual -= w(static_cast<Index>(a)) * Yr.row(nbrs[a]);
    double variance = residual.squaredNorm();
    if (opts.per_feature_variance) variance /= p;
    if (variance < opts.residual_floor) {
      variance = opts.residual_floor;
      ++floored;
    }
    fit.weights.precision(i) = 1.0 / std::sqrt(variance);
  }
  if (floored > 0) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", opts.residual_floor);
    fit.warnings.push_back(std::string("alle_fit: residual variance floored at ") + buf + " for " +
                           std::to_string(floored) + " point(s)");
  }

  fit.factor = fit.weights.factor(true);
  fit.log_likelihood = pseudo_log_likelihood(Yr, fit.factor);

  // Precision M M^T = L + eps^2 e_last e_last^T, with L the factor's
  // Laplacian once the last diagonal is zeroed; mapped back to original labels.
  graphs::FactorMatrix M0 = fit.factor;
  M0.m.coeffRef(n - 1, n - 1) = 0.0;
  M0.m.prune(0.0);
  const graphs::Laplacian Lr = graphs::laplacian_from_factor(M0);
  std::vector<graphs::EdgeMultiplier> multipliers;
  multipliers.reserve(Lr.multipliers().size());
  Eigen::VectorXd diagonal(n);
  for (const auto& e : Lr.multipliers()) {
    const Index a = fit.order[static_cast<std::size_t>(e.i)];
    const Index b = fit.order[static_cast<std::size_t>(e.j)];
    multipliers.push_back({std::min(a, b), std::max(a, b), e.value});
  }
  std::sort(multipliers.begin(), multipliers.end(), [](const auto& x, const auto& y) {
    return x.i < y.i || (x.i == y.i && x.j < y.j);
  });
  for (Index r = 0; r < n; ++r) diagonal(fit.order[static_cast<std::size_t>(r)]) = Lr.diagonal()(r);
  Eigen::VectorXd extra = Eigen::VectorXd::Zero(n);
  extra(fit.order.back()) = opts.eps_last * opts.eps_last;
  fit.model = GrfModel(graphs::Laplacian(n, std::move(multipliers), std::move(diagonal)), 0.0, Y.cols(),
                       fit.log_likelihood, std::move(extra));
  fit.model.set_factor(fit.factor, fit.order);
  fit.model.info.warnings = fit.warnings;
  return fit;
}

Embedding alle_embed(const AlleFit& fit, Index q) {
  Embedding out = grf_embed(fit.model, q);
  out.method = "alle";
  return out;
}

double pseudo_log_likelihood(const DataMatrix& Y, const graphs::FactorMatrix& M) {
  if (M.n != Y.rows()) throw InvalidArgument("pseudo_log_likelihood: factor does not match data");
  const double p = static_cast<double>(Y.cols());
  const Eigen::MatrixXd projected = Eigen::MatrixXd(M.m.transpose() * Y);  // row i is (Y^T m_i)^T
  double total = 0.0;
  for (Index i = 0; i < M.n; ++i) {
    const double m = M.m.coeff(i, i);
    if (m == 0.0) throw InvalidArgument("pseudo_log_likelihood: m_ii = 0 at point " + std::to_string(i));
    total += 0.5 * p * std::log(m * m / (2.0 * std::numbers::pi)) - 0.5 * projected.row(i).squaredNorm();
  }
  return total;
}

}  // namespace unfold::models
