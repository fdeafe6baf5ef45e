#pragma once

#include <Eigen/Core>

#include <string>
#include <vector>

namespace unfold::cli {

struct ScatterOptions {
  std::string title;
  /// Join the points in row order with a polyline.
  bool trajectory = false;
  int size = 480;
};

/// SVG 1.1 scatter of the first two columns of X (a single column is drawn
/// against zero). Points are colored by `labels` when it has one value per
/// row, otherwise by row order.
std::string scatter_svg(const Eigen::MatrixXd& X, const std::vector<double>& labels = {},
                        const ScatterOptions& opts = {});

}  // namespace unfold::cli
