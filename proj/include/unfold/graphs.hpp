#pragma once

#include "unfold/types.hpp"

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <span>
#include <vector>

namespace unfold::graphs {

enum class GraphKind { kUndirected, kAcyclic };

/// Neighborhood structure over n points.
///
/// Undirected graphs keep j in N(i) iff i in N(j). Acyclic graphs live in a
/// relabeled index space: position r holds original point `order[r]`, and
/// every neighbor (parent) of r has a strictly larger position. Neighbor lists
/// are sorted ascending.
class NeighborGraph {
public:
  NeighborGraph() = default;
  NeighborGraph(GraphKind kind, std::vector<std::vector<Index>> neighbors,
                std::vector<Index> order = {});

  Index size() const { return static_cast<Index>(neighbors_.size()); }
  GraphKind kind() const { return kind_; }
  const std::vector<Index>& neighbors(Index i) const { return neighbors_[static_cast<std::size_t>(i)]; }
  const std::vector<std::vector<Index>>& all_neighbors() const { return neighbors_; }
  bool has_edge(Index i, Index j) const;

  /// Undirected edges (i < j) in lexicographic order. For an acyclic graph
  /// these are the (child, parent) pairs.
  std::vector<std::pair<Index, Index>> edges() const;
  Index edge_count() const;

  /// Relabeling for acyclic graphs; identity (empty) otherwise.
  const std::vector<Index>& order() const { return order_; }

  /// Connected components (undirected view), each sorted ascending, ordered
  /// by their smallest member.
  std::vector<std::vector<Index>> components() const;
  bool connected() const { return components().size() <= 1; }

private:
  GraphKind kind_ = GraphKind::kUndirected;
  std::vector<std::vector<Index>> neighbors_;
  std::vector<Index> order_;
};

/// Symmetric nonnegative weights on the edges of an undirected graph.
struct WeightedAdjacency {
  Index n = 0;
  Eigen::SparseMatrix<double> weights;  // symmetric, zero diagonal

  Eigen::MatrixXd dense() const { return Eigen::MatrixXd(weights); }
};

/// Lagrange multiplier attached to one undirected edge.
struct EdgeMultiplier {
  Index i = 0;
  Index j = 0;
  double value = 0.0;
};

enum class Storage { kAuto, kDense, kSparse };

/// Size above which kAuto assembles sparse matrices.
inline constexpr Index kSparseThreshold = 512;

/// Graph Laplacian with off-diagonal entries -lambda_ij and a diagonal that
/// makes every row sum to zero.
///
/// The multipliers and the diagonal are stored once; dense and sparse
/// assembly copy the same values, so the two forms agree bit for bit.
class Laplacian {
public:
  Laplacian() = default;
  Laplacian(Index n, std::vector<EdgeMultiplier> multipliers, Eigen::VectorXd diagonal);

  Index size() const { return n_; }
  const std::vector<EdgeMultiplier>& multipliers() const { return multipliers_; }
  const Eigen::VectorXd& diagonal() const { return diagonal_; }

  Eigen::MatrixXd dense() const;
  Eigen::SparseMatrix<double> sparse() const;
  bool prefers_sparse(Storage storage = Storage::kAuto) const;

private:
  Index n_ = 0;
  std::vector<EdgeMultiplier> multipliers_;
  Eigen::VectorXd diagonal_;
};

/// Factor M of a Laplacian L = M M^T. Column i holds -w_ji on the neighbors of
/// i and m_ii on the diagonal; columns sum to zero except where a diagonal was
/// explicitly relaxed (the last point in the acyclic case).
struct FactorMatrix {
  Index n = 0;
  Eigen::SparseMatrix<double> m;  // column major, n x n
  bool lower_triangular = false;

  Eigen::MatrixXd dense() const { return Eigen::MatrixXd(m); }
  /// max_i |sum_j m_ji|.
  double max_column_sum() const;
};

/// Undirected k-nearest-neighbor graph under squared Euclidean distance.
/// Ties break toward the lower index; the relation is symmetrized by union.
NeighborGraph knn_graph(const DataMatrix& Y, Index k);

/// Directed acyclic neighborhoods: after relabeling the rows by `ordering`
/// (position r holds row ordering[r]), N(r) holds the up-to-k nearest
/// positions s > r. An empty ordering means the identity.
NeighborGraph acyclic_graph(const DataMatrix& Y, Index k, std::span<const Index> ordering = {});

/// Uniformly random permutation of [0, n) from a seeded generator.
std::vector<Index> random_ordering(Index n, unsigned long long seed);

/// Heat-kernel weights exp(-|y_i - y_j|^2 / (2 sigma^2)) on the edges of g.
WeightedAdjacency heat_adjacency(const DataMatrix& Y, const NeighborGraph& g, double sigma);

/// Weight 1 on every edge of g.
WeightedAdjacency unit_adjacency(const NeighborGraph& g);

/// Diagonal matrix of row sums of A.
Eigen::DiagonalMatrix<double, Eigen::Dynamic> degree_matrix(const WeightedAdjacency& A);

/// D - A.
Laplacian laplacian_from_adjacency(const WeightedAdjacency& A);

/// Assembles L from per-edge multipliers. Edges of g without an entry get a
/// zero multiplier; an entry off the edge set throws InvalidArgument.
Laplacian laplacian_from_multipliers(const NeighborGraph& g, std::span<const EdgeMultiplier> lambdas);

/// Multipliers given in the order of g.edges().
Laplacian laplacian_from_edge_values(const NeighborGraph& g, const Eigen::VectorXd& values);

/// L = M M^T.
Laplacian laplacian_from_factor(const FactorMatrix& M);

}  // namespace unfold::graphs
