#pragma once

#include "unfold/types.hpp"

#include <string>
#include <vector>

namespace unfold {

enum class Ordering { kIdentity, kRandom };

/// Everything needed to run one embedding method end to end.
struct MethodParams {
  std::string method = "pca";  // meu, lle, alle, le, isomap, drill, kpca, pca
  Index k = 10;                // neighbors
  Index q = 2;                 // latent dimensions
  double gamma = 1e-4;         // MEU base precision
  double rho = 1.0;            // DRILL L1 weight (raw scale)
  double sigma = 0.0;          // le: heat width (0 = unit weights); kpca: rbf width (0 = median heuristic)
  double ridge = 1e-6;         // LLE / ALLE relative ridge
  unsigned long long seed = 0;
  Ordering ordering = Ordering::kIdentity;  // ALLE point ordering
  bool strict_connectivity = false;
  double eps_last = 1e-3;      // ALLE precision of the last point
  double drill_floor = 1e-3;   // ridge on the DRILL second moments, relative to their mean diagonal
  bool drill_knn_pattern = false;  // DRILL: only kNN edges may be nonzero; otherwise the L1 term selects them
  int max_iters = 5000;        // MEU iteration cap
};

/// Names accepted by run_method, in canonical order.
const std::vector<std::string>& method_names();

bool is_method(const std::string& name);

/// Builds the neighborhood structure the method needs, fits it and embeds.
/// Throws unfold::Error subclasses on failure.
Embedding run_method(const DataMatrix& Y, const MethodParams& params);

}  // namespace unfold
