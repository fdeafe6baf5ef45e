#pragma once

#include "unfold/graphs.hpp"
#include "unfold/types.hpp"

#include <vector>

namespace unfold::models {

struct WeightedEdge {
  Index i = 0;
  Index j = 0;
  double length = 0.0;
};

/// All-pairs shortest path lengths by Dijkstra from every source over an
/// undirected edge list. Unreachable pairs are +infinity. Throws
/// InvalidArgument on a negative or non-finite length.
Eigen::MatrixXd shortest_paths(Index n, const std::vector<WeightedEdge>& edges);

/// Edges of g with Euclidean lengths |y_i - y_j|.
std::vector<WeightedEdge> euclidean_edges(const DataMatrix& Y, const graphs::NeighborGraph& g);

struct IsomapOptions {
  /// Throw DisconnectedGraph instead of restricting to the largest component.
  bool strict_connectivity = false;
  Index dense_limit = 2048;
};

/// CMDS on the elementwise-squared geodesic distances. On a disconnected
/// graph the largest component is embedded and `index_map` records which
/// original rows the embedding rows belong to.
Embedding isomap(const DataMatrix& Y, const graphs::NeighborGraph& g, Index q, const IsomapOptions& opts = {});

}  // namespace unfold::models
