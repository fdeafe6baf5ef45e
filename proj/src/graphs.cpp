#include "unfold/graphs.hpp"

#include "unfold/error.hpp"
#include "unfold/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <string>

namespace unfold::graphs {

namespace {

double squared_distance(const DataMatrix& Y, Index a, Index b) {
  return (Y.row(a) - Y.row(b)).squaredNorm();
}

struct Candidate {
  double distance;
  Index index;
  bool operator<(const Candidate& other) const {
    return distance < other.distance || (distance == other.distance && index < other.index);
  }
};

void keep_nearest(std::vector<Candidate>& candidates, Index k) {
  const auto keep = std::min<std::size_t>(static_cast<std::size_t>(k), candidates.size());
  std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(keep),
                    candidates.end());
  candidates.resize(keep);
}

}  // namespace

NeighborGraph::NeighborGraph(GraphKind kind, std::vector<std::vector<Index>> lists,
                             std::vector<Index> order)
    : kind_(kind), neighbors_(std::move(lists)), order_(std::move(order)) {
  const Index n = size();
  for (Index i = 0; i < n; ++i) {
    auto& list = neighbors_[static_cast<std::size_t>(i)];
    std::sort(list.begin(), list.end());
    if (std::adjacent_find(list.begin(), list.end()) != list.end()) {
      throw InvalidArgument("neighbor list of point " + std::to_string(i) + " has duplicates");
    }
    for (Index j : list) {
      if (j < 0 || j >= n) throw InvalidArgument("neighbor index out of range");
      if (j == i) throw InvalidArgument("self-loop at point " + std::to_string(i));
      if (kind_ == GraphKind::kAcyclic && j <= i) {
        throw InvalidArgument("acyclic graph: neighbor " + std::to_string(j) +
                              " does not follow point " + std::to_string(i));
      }
    }
  }
  if (kind_ == GraphKind::kUndirected) {
    for (Index i = 0; i < n; ++i) {
      for (Index j : neighbors(i)) {
        if (!has_edge(j, i)) throw InvalidArgument("undirected graph is not symmetric");
      }
    }
  }
  if (!order_.empty() && static_cast<Index>(order_.size()) != n) {
    throw InvalidArgument("ordering length does not match graph size");
  }
}

bool NeighborGraph::has_edge(Index i, Index j) const {
  const auto& list = neighbors(i);
  return std::binary_search(list.begin(), list.end(), j);
}

std::vector<std::pair<Index, Index>> NeighborGraph::edges() const {
  std::vector<std::pair<Index, Index>> out;
  for (Index i = 0; i < size(); ++i) {
    for (Index j : neighbors(i)) {
      if (kind_ == GraphKind::kAcyclic || i < j) out.emplace_back(i, j);
    }
  }
  return out;
}

Index NeighborGraph::edge_count() const {
  Index total = 0;
  for (const auto& list : neighbors_) total += static_cast<Index>(list.size());
  return kind_ == GraphKind::kUndirected ? total / 2 : total;
}

std::vector<std::vector<Index>> NeighborGraph::components() const {
  const Index n = size();
  // Undirected adjacency view (acyclic graphs only store child -> parent).
  std::vector<std::vector<Index>> adj = neighbors_;
  if (kind_ == GraphKind::kAcyclic) {
    for (Index i = 0; i < n; ++i) {
      for (Index j : neighbors(i)) adj[static_cast<std::size_t>(j)].push_back(i);
    }
  }
  std::vector<int> seen(static_cast<std::size_t>(n), 0);
  std::vector<std::vector<Index>> out;
  for (Index start = 0; start < n; ++start) {
    if (seen[static_cast<std::size_t>(start)]) continue;
    std::vector<Index> comp{start};
    seen[static_cast<std::size_t>(start)] = 1;
    for (std::size_t head = 0; head < comp.size(); ++head) {
      for (Index j : adj[static_cast<std::size_t>(comp[head])]) {
        if (!seen[static_cast<std::size_t>(j)]) {
          seen[static_cast<std::size_t>(j)] = 1;
          comp.push_back(j);
        }
      }
    }
    std::sort(comp.begin(), comp.end());
    out.push_back(std::move(comp));
  }
  return out;
}

NeighborGraph knn_graph(const DataMatrix& Y, Index k) {
  const Index n = Y.rows();
  if (n < 2) throw InvalidArgument("knn_graph: need at least 2 points");
  if (k < 1 || k > n - 1) {
    throw InvalidArgument("knn_graph: k=" + std::to_string(k) + " outside [1, " +
                          std::to_string(n - 1) + "]");
  }

  std::vector<std::vector<Index>> selected(static_cast<std::size_t>(n));
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t row) {
    const auto i = static_cast<Index>(row);
    std::vector<Candidate> candidates;
    candidates.reserve(static_cast<std::size_t>(n - 1));
    for (Index j = 0; j < n; ++j) {
      if (j != i) candidates.push_back({squared_distance(Y, i, j), j});
    }
    keep_nearest(candidates, k);
    for (const auto& c : candidates) selected[row].push_back(c.index);
  });

  std::vector<std::vector<Index>> neighbors(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    for (Index j : selected[static_cast<std::size_t>(i)]) {
      neighbors[static_cast<std::size_t>(i)].push_back(j);
      neighbors[static_cast<std::size_t>(j)].push_back(i);
    }
  }
  for (auto& list : neighbors) {
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
  }
  return NeighborGraph(GraphKind::kUndirected, std::move(neighbors));
}

NeighborGraph acyclic_graph(const DataMatrix& Y, Index k, std::span<const Index> ordering) {
  const Index n = Y.rows();
  if (n < 1) throw InvalidArgument("acyclic_graph: empty data");
  if (k < 1) throw InvalidArgument("acyclic_graph: k must be positive");

  std::vector<Index> order(ordering.begin(), ordering.end());
  if (order.empty()) {
    order.resize(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Index{0});
  }
  if (static_cast<Index>(order.size()) != n) {
    throw InvalidArgument("acyclic_graph: ordering has wrong length");
  }
  std::vector<int> hit(static_cast<std::size_t>(n), 0);
  for (Index v : order) {
    if (v < 0 || v >= n || hit[static_cast<std::size_t>(v)]++) {
      throw InvalidArgument("acyclic_graph: ordering is not a permutation");
    }
  }

  std::vector<std::vector<Index>> parents(static_cast<std::size_t>(n));
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t row) {
    const auto r = static_cast<Index>(row);
    std::vector<Candidate> candidates;
    for (Index s = r + 1; s < n; ++s) {
      candidates.push_back({squared_distance(Y, order[row], order[static_cast<std::size_t>(s)]), s});
    }
    keep_nearest(candidates, k);
    for (const auto& c : candidates) parents[row].push_back(c.index);
  });
  return NeighborGraph(GraphKind::kAcyclic, std::move(parents), std::move(order));
}

std::vector<Index> random_ordering(Index n, unsigned long long seed) {
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::mt19937_64 rng(seed);
  // Fisher-Yates with explicit draws; std::shuffle is not specified bit-exactly.
  for (Index i = n - 1; i > 0; --i) {
    const auto j = static_cast<Index>(rng() % static_cast<unsigned long long>(i + 1));
    std::swap(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(j)]);
  }
  return order;
}

namespace {

WeightedAdjacency adjacency_from(const NeighborGraph& g,
                                 const std::function<double(Index, Index)>& weight) {
  if (g.kind() != GraphKind::kUndirected) {
    throw InvalidArgument("adjacency requires an undirected graph");
  }
  const Index n = g.size();
  std::vector<Eigen::Triplet<double>> triplets;
  for (const auto& [i, j] : g.edges()) {
    const double w = weight(i, j);
    triplets.emplace_back(i, j, w);
    triplets.emplace_back(j, i, w);
  }
  WeightedAdjacency A;
  A.n = n;
  A.weights.resize(n, n);
  A.weights.setFromTriplets(triplets.begin(), triplets.end());
  return A;
}

}  // namespace

WeightedAdjacency heat_adjacency(const DataMatrix& Y, const NeighborGraph& g, double sigma) {
  if (!(sigma > 0.0)) throw InvalidArgument("heat_adjacency: sigma must be positive");
  if (Y.rows() != g.size()) throw InvalidArgument("heat_adjacency: graph/data size mismatch");
  const double scale = 1.0 / (2.0 * sigma * sigma);
  return adjacency_from(g, [&](Index i, Index j) { return std::exp(-squared_distance(Y, i, j) * scale); });
}

WeightedAdjacency unit_adjacency(const NeighborGraph& g) {
  return adjacency_from(g, [](Index, Index) { return 1.0; });
}

Eigen::DiagonalMatrix<double, Eigen::Dynamic> degree_matrix(const WeightedAdjacency& A) {
  Eigen::VectorXd d = Eigen::VectorXd::Zero(A.n);
  for (Index col = 0; col < A.weights.outerSize(); ++col) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(A.weights, col); it; ++it) {
      d(it.row()) += it.value();
    }
  }
  return Eigen::DiagonalMatrix<double, Eigen::Dynamic>(d);
}

Laplacian::Laplacian(Index n, std::vector<EdgeMultiplier> multipliers, Eigen::VectorXd diagonal)
    : n_(n), multipliers_(std::move(multipliers)), diagonal_(std::move(diagonal)) {
  if (diagonal_.size() != n_) throw InvalidArgument("Laplacian: diagonal has wrong size");
}

Eigen::MatrixXd Laplacian::dense() const {
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(n_, n_);
  L.diagonal() = diagonal_;
  for (const auto& e : multipliers_) {
    L(e.i, e.j) = -e.value;
    L(e.j, e.i) = -e.value;
  }
  return L;
}

Eigen::SparseMatrix<double> Laplacian::sparse() const {
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(n_) + 2 * multipliers_.size());
  for (Index i = 0; i < n_; ++i) triplets.emplace_back(i, i, diagonal_(i));
  for (const auto& e : multipliers_) {
    triplets.emplace_back(e.i, e.j, -e.value);
    triplets.emplace_back(e.j, e.i, -e.value);
  }
  Eigen::SparseMatrix<double> L(n_, n_);
  L.setFromTriplets(triplets.begin(), triplets.end());
  return L;
}

bool Laplacian::prefers_sparse(Storage storage) const {
  switch (storage) {
    case Storage::kDense: return false;
    case Storage::kSparse: return true;
    case Storage::kAuto: break;
  }
  return n_ > kSparseThreshold;
}

namespace {

Laplacian assemble(Index n, std::vector<EdgeMultiplier> multipliers) {
  Eigen::VectorXd diagonal = Eigen::VectorXd::Zero(n);
  for (const auto& e : multipliers) {
    diagonal(e.i) += e.value;
    diagonal(e.j) += e.value;
  }
  return Laplacian(n, std::move(multipliers), std::move(diagonal));
}

}  // namespace

Laplacian laplacian_from_adjacency(const WeightedAdjacency& A) {
  std::vector<EdgeMultiplier> multipliers;
  for (Index col = 0; col < A.weights.outerSize(); ++col) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(A.weights, col); it; ++it) {
      if (it.row() < col) multipliers.push_back({it.row(), col, it.value()});
    }
  }
  std::sort(multipliers.begin(), multipliers.end(), [](const auto& a, const auto& b) {
    return a.i < b.i || (a.i == b.i && a.j < b.j);
  });
  return assemble(A.n, std::move(multipliers));
}

Laplacian laplacian_from_multipliers(const NeighborGraph& g, std::span<const EdgeMultiplier> lambdas) {
  if (g.kind() != GraphKind::kUndirected) {
    throw InvalidArgument("laplacian_from_multipliers: graph must be undirected");
  }
  const auto edges = g.edges();
  std::map<std::pair<Index, Index>, std::size_t> slot;
  for (std::size_t e = 0; e < edges.size(); ++e) slot[edges[e]] = e;

  std::vector<EdgeMultiplier> multipliers(edges.size());
  std::vector<int> assigned(edges.size(), 0);
  for (std::size_t e = 0; e < edges.size(); ++e) multipliers[e] = {edges[e].first, edges[e].second, 0.0};
  for (const auto& lam : lambdas) {
    const auto key = std::minmax(lam.i, lam.j);
    const auto it = slot.find({key.first, key.second});
    if (it == slot.end()) {
      throw InvalidArgument("multiplier supplied for (" + std::to_string(lam.i) + ", " +
                            std::to_string(lam.j) + ") which is not an edge");
    }
    auto& m = multipliers[it->second];
    if (assigned[it->second]++ && m.value != lam.value) {
      throw InvalidArgument("asymmetric multipliers for edge (" + std::to_string(key.first) +
                            ", " + std::to_string(key.second) + ")");
    }
    m.value = lam.value;
  }
  return assemble(g.size(), std::move(multipliers));
}

Laplacian laplacian_from_edge_values(const NeighborGraph& g, const Eigen::VectorXd& values) {
  const auto edges = g.edges();
  if (static_cast<Index>(edges.size()) != values.size()) {
    throw InvalidArgument("laplacian_from_edge_values: one value per edge required");
  }
  std::vector<EdgeMultiplier> multipliers;
  multipliers.reserve(edges.size());
  for (std::size_t e = 0; e < edges.size(); ++e) {
    multipliers.push_back({edges[e].first, edges[e].second, values(static_cast<Index>(e))});
  }
  return assemble(g.size(), std::move(multipliers));
}

double FactorMatrix::max_column_sum() const {
  double worst = 0.0;
  for (Index col = 0; col < m.outerSize(); ++col) {
    double sum = 0.0;
    for (Eigen::SparseMatrix<double>::InnerIterator it(m, col); it; ++it) sum += it.value();
    worst = std::max(worst, std::abs(sum));
  }
  return worst;
}

Laplacian laplacian_from_factor(const FactorMatrix& M) {
  const Eigen::SparseMatrix<double> mt = M.m.transpose();
  const Eigen::SparseMatrix<double> L = (M.m * mt).pruned(0.0);
  std::vector<EdgeMultiplier> multipliers;
  Eigen::VectorXd diagonal = Eigen::VectorXd::Zero(M.n);
  for (Index col = 0; col < L.outerSize(); ++col) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(L, col); it; ++it) {
      if (it.row() == col) {
        diagonal(col) = it.value();
      } else if (it.row() < col) {
        multipliers.push_back({it.row(), col, -it.value()});
      }
    }
  }
  std::sort(multipliers.begin(), multipliers.end(), [](const auto& a, const auto& b) {
    return a.i < b.i || (a.i == b.i && a.j < b.j);
  });
  return Laplacian(M.n, std::move(multipliers), std::move(diagonal));
}

}  // namespace unfold::graphs
