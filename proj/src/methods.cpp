#include "unfold/methods.hpp"

#include "unfold/drill.hpp"
#include "unfold/error.hpp"
#include "unfold/graphs.hpp"
#include "unfold/isomap.hpp"
#include "unfold/laplacian_eigenmaps.hpp"
#include "unfold/lle.hpp"
#include "unfold/meu.hpp"
#include "unfold/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

namespace unfold {

const std::vector<std::string>& method_names() {
  static const std::vector<std::string> names{"meu", "lle", "alle", "le", "isomap", "drill", "kpca", "pca"};
  return names;
}

bool is_method(const std::string& name) {
  const auto& names = method_names();
  return std::find(names.begin(), names.end(), name) != names.end();
}

namespace {

// Median pairwise distance; the default rbf width.
double median_distance(const DataMatrix& Y) {
  const Eigen::MatrixXd D = spectral::squared_distances(Y);
  std::vector<double> values;
  for (Index j = 0; j < D.cols(); ++j) {
    for (Index i = 0; i < j; ++i) values.push_back(std::sqrt(D(i, j)));
  }
  if (values.empty()) return 1.0;
  auto mid = values.begin() + static_cast<std::ptrdiff_t>(values.size() / 2);
  std::nth_element(values.begin(), mid, values.end());
  return *mid > 0.0 ? *mid : 1.0;
}

}  // namespace

Embedding run_method(const DataMatrix& Y, const MethodParams& params) {
  const std::string& m = params.method;
  if (!is_method(m)) throw InvalidArgument("unknown method '" + m + "'");
  if (params.q < 1) throw InvalidArgument("q must be at least 1");
  if (Y.rows() < 3) throw InvalidArgument("need at least 3 points");

  if (m == "pca" || m == "kpca") {
    spectral::Kernel kernel;
    if (m == "kpca") {
      const double sigma = params.sigma > 0.0 ? params.sigma : median_distance(Y);
      kernel.kind = spectral::KernelKind::kRbf;
      kernel.gamma = 1.0 / (2.0 * sigma * sigma);
    }
    return spectral::kernel_pca(Y, kernel, params.q);
  }

  if (m == "alle") {
    std::vector<Index> order;
    if (params.ordering == Ordering::kRandom) order = graphs::random_ordering(Y.rows(), params.seed);
    const graphs::NeighborGraph g = graphs::acyclic_graph(Y, params.k, order);
    models::AlleOptions opts;
    opts.eps_last = params.eps_last;
    opts.ridge = params.ridge;
    return models::alle_embed(models::alle_fit(Y, g, opts), params.q);
  }

  if (m == "drill") {
    models::DrillOptions opts;
    opts.rho = params.rho;
    opts.floor = params.drill_floor;
    std::optional<graphs::NeighborGraph> pattern;
    if (params.drill_knn_pattern) {
      pattern = graphs::knn_graph(Y, params.k);
      opts.pattern = &*pattern;
    }
    return models::drill_embed(models::drill_fit(Y, opts), params.q);
  }

  const graphs::NeighborGraph g = graphs::knn_graph(Y, params.k);
  if (m == "meu") {
    models::MeuFitConfig cfg;
    cfg.gamma = params.gamma;
    cfg.max_iters = params.max_iters;
    return models::meu_embed(models::meu_fit(Y, g, cfg), params.q);
  }
  if (m == "lle") return models::lle_embed(models::lle_weights(Y, g, params.ridge), params.q);
  if (m == "le") {
    models::LaplacianEigenmapsOptions opts;
    opts.weighted = params.sigma > 0.0;
    opts.sigma = params.sigma;
    return models::laplacian_eigenmaps(Y, g, params.q, opts);
  }
  models::IsomapOptions opts;
  opts.strict_connectivity = params.strict_connectivity;
  return models::isomap(Y, g, params.q, opts);
}

}  // namespace unfold
