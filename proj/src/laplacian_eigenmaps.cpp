#include "unfold/laplacian_eigenmaps.hpp"

#include "unfold/error.hpp"
#include "unfold/lanczos.hpp"
#include "unfold/spectral.hpp"

#include <cmath>
#include <sstream>
#include <string>

namespace unfold::models {

namespace {

std::string describe_components(const std::vector<std::vector<Index>>& comps) {
  std::ostringstream os;
  os << comps.size() << " connected components:";
  for (std::size_t c = 0; c < comps.size(); ++c) {
    os << (c ? ", " : " ") << "{";
    const std::size_t shown = std::min<std::size_t>(comps[c].size(), 5);
    for (std::size_t a = 0; a < shown; ++a) os << (a ? "," : "") << comps[c][a];
    if (shown < comps[c].size()) os << ",... (" << comps[c].size() << " points)";
    os << "}";
  }
  return os.str();
}

}  // namespace

Eigen::MatrixXd normalized_laplacian(const graphs::WeightedAdjacency& A) {
  const Eigen::VectorXd d = graphs::degree_matrix(A).diagonal();
  for (Index i = 0; i < d.size(); ++i) {
    if (!(d(i) > 0.0)) throw InvalidArgument("normalized_laplacian: point " + std::to_string(i) + " has zero degree");
  }
  const Eigen::VectorXd s = d.cwiseSqrt().cwiseInverse();
  Eigen::MatrixXd N = graphs::laplacian_from_adjacency(A).dense();
  N = s.asDiagonal() * N * s.asDiagonal();
  return 0.5 * (N + N.transpose());
}

Embedding laplacian_eigenmaps(const DataMatrix& Y, const graphs::NeighborGraph& g, Index q,
                              const LaplacianEigenmapsOptions& opts) {
  const Index n = g.size();
  if (Y.rows() != n) throw InvalidArgument("laplacian_eigenmaps: graph does not match data");
  if (q < 1 || q >= n - 1) {
    throw InvalidArgument("laplacian_eigenmaps: q=" + std::to_string(q) + " must satisfy 1 <= q < n-1");
  }
  if (opts.weighted && !(opts.sigma > 0.0)) {
    throw InvalidArgument("laplacian_eigenmaps: sigma must be given (> 0) for heat weights");
  }
  const auto comps = g.components();
  if (comps.size() > 1) throw DisconnectedGraph("laplacian_eigenmaps: graph has " + describe_components(comps));

  const graphs::WeightedAdjacency A = opts.weighted ? graphs::heat_adjacency(Y, g, opts.sigma) : graphs::unit_adjacency(g);
  const graphs::Laplacian L = graphs::laplacian_from_adjacency(A);
  const Eigen::VectorXd degree = graphs::degree_matrix(A).diagonal();

  spectral::EigenPairs pairs;
  if (n <= opts.dense_limit) {
    pairs = opts.normalized ? spectral::gen_eig(L.dense(), degree) : spectral::sym_eig(L.dense());
  } else {
    const Eigen::SparseMatrix<double> Ls = L.sparse();
    const Eigen::VectorXd s = degree.cwiseSqrt().cwiseInverse();
    if (opts.normalized) {
      pairs = spectral::lanczos(
          [&](const Eigen::VectorXd& x, Eigen::VectorXd& y) {
            y = s.cwiseProduct(Ls * s.cwiseProduct(x));
          },
          n, q + 1, spectral::Which::kSmallest);
      // Back from the normalized problem: u = D^{-1/2} v, D-orthonormal.
      pairs.vectors = s.asDiagonal() * pairs.vectors;
    } else {
      pairs = spectral::lanczos([&](const Eigen::VectorXd& x, Eigen::VectorXd& y) { y.noalias() = Ls * x; }, n, q + 1,
                                spectral::Which::kSmallest);
    }
  }

  Embedding out;
  out.method = "le";
  out.spectrum_sign = -1;
  out.X = pairs.vectors.middleCols(1, q);
  spectral::fix_signs(out.X);
  out.eigenvalues = -pairs.values.segment(1, q);
  if (pairs.values.size() == n) out.diagnostics.discarded_mass = pairs.values.tail(n - q - 1).sum();
  return out;
}

}  // namespace unfold::models
