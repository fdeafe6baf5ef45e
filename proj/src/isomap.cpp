#include "unfold/isomap.hpp"

#include "unfold/error.hpp"
#include "unfold/parallel.hpp"
#include "unfold/spectral.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <queue>
#include <string>

namespace unfold::models {

Eigen::MatrixXd shortest_paths(Index n, const std::vector<WeightedEdge>& edges) {
  std::vector<std::vector<std::pair<Index, double>>> adj(static_cast<std::size_t>(n));
  for (const auto& e : edges) {
    if (e.i < 0 || e.i >= n || e.j < 0 || e.j >= n) throw InvalidArgument("shortest_paths: edge index out of range");
    if (!(e.length >= 0.0) || !std::isfinite(e.length)) {
      throw InvalidArgument("shortest_paths: edge (" + std::to_string(e.i) + ", " + std::to_string(e.j) +
                            ") has invalid length");
    }
    adj[static_cast<std::size_t>(e.i)].emplace_back(e.j, e.length);
    adj[static_cast<std::size_t>(e.j)].emplace_back(e.i, e.length);
  }

  constexpr double kInf = std::numeric_limits<double>::infinity();
  Eigen::MatrixXd G = Eigen::MatrixXd::Constant(n, n, kInf);
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t src) {
    // Column src of G is owned by this iteration.
    auto dist = G.col(static_cast<Index>(src));
    using Item = std::pair<double, Index>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    dist(static_cast<Index>(src)) = 0.0;
    heap.emplace(0.0, static_cast<Index>(src));
    while (!heap.empty()) {
      const auto [du, u] = heap.top();
      heap.pop();
      if (du > dist(u)) continue;
      for (const auto& [v, len] : adj[static_cast<std::size_t>(u)]) {
        const double alt = du + len;
        if (alt < dist(v)) {
          dist(v) = alt;
          heap.emplace(alt, v);
        }
      }
    }
  });
  // Path sums can differ in the last bit between directions; keep one.
  for (Index j = 0; j < n; ++j) {
    for (Index i = j + 1; i < n; ++i) G(j, i) = G(i, j);
  }
  return G;
}

std::vector<WeightedEdge> euclidean_edges(const DataMatrix& Y, const graphs::NeighborGraph& g) {
  std::vector<WeightedEdge> out;
  for (const auto& [i, j] : g.edges()) out.push_back({i, j, (Y.row(i) - Y.row(j)).norm()});
  return out;
}

Embedding isomap(const DataMatrix& Y, const graphs::NeighborGraph& g, Index q, const IsomapOptions& opts) {
  if (g.kind() != graphs::GraphKind::kUndirected) throw InvalidArgument("isomap: graph must be undirected");
  if (Y.rows() != g.size()) throw InvalidArgument("isomap: graph does not match data");

  const auto comps = g.components();
  std::vector<std::string> warnings;
  std::vector<Index> keep;
  if (comps.size() > 1) {
    if (opts.strict_connectivity) {
      throw DisconnectedGraph("isomap: graph has " + std::to_string(comps.size()) + " connected components");
    }
    std::size_t best = 0;
    for (std::size_t c = 1; c < comps.size(); ++c) {
      if (comps[c].size() > comps[best].size()) best = c;
    }
    keep = comps[best];
    warnings.push_back("isomap: graph has " + std::to_string(comps.size()) +
                       " connected components; embedding the largest (" + std::to_string(keep.size()) + " of " +
                       std::to_string(g.size()) + " points)");
  }

  Eigen::MatrixXd G;
  if (keep.empty()) {
    G = shortest_paths(g.size(), euclidean_edges(Y, g));
  } else {
    std::vector<Index> position(static_cast<std::size_t>(g.size()), -1);
    for (std::size_t a = 0; a < keep.size(); ++a) position[static_cast<std::size_t>(keep[a])] = static_cast<Index>(a);
    std::vector<WeightedEdge> edges;
    for (const auto& e : euclidean_edges(Y, g)) {
      const Index a = position[static_cast<std::size_t>(e.i)];
      const Index b = position[static_cast<std::size_t>(e.j)];
      if (a >= 0 && b >= 0) edges.push_back({a, b, e.length});
    }
    G = shortest_paths(static_cast<Index>(keep.size()), edges);
  }

  const SquaredDistanceMatrix D = G.cwiseProduct(G);
  Embedding out = spectral::cmds_embed(spectral::distances_to_similarities(D), q, opts.dense_limit);
  out.method = "isomap";
  out.index_map = std::move(keep);
  out.warnings = std::move(warnings);
  return out;
}

}  // namespace unfold::models
