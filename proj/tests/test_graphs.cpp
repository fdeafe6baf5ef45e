#include <doctest.h>

#include "helpers.hpp"
#include "oracle.hpp"

#include "unfold/error.hpp"
#include "unfold/graphs.hpp"
#include "unfold/spectral.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

using namespace unfold;
using namespace unfold::graphs;

namespace {

NeighborGraph path3() { return NeighborGraph(GraphKind::kUndirected, {{1}, {0, 2}, {1}}); }

NeighborGraph complete(Index n) {
  std::vector<std::vector<Index>> nb(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      if (i != j) nb[static_cast<std::size_t>(i)].push_back(j);
    }
  }
  return NeighborGraph(GraphKind::kUndirected, nb);
}

double min_eig(const Eigen::MatrixXd& A) {
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(A, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
}

}  // namespace

TEST_CASE("knn_graph: collinear 0,1,3 with k=1 gives a path") {
  Eigen::MatrixXd Y(3, 1);
  Y << 0.0, 1.0, 3.0;
  const auto g = knn_graph(Y, 1);
  CHECK(g.edges() == std::vector<std::pair<Index, Index>>{{0, 1}, {1, 2}});
}

TEST_CASE("knn_graph: k = n-1 is complete") {
  const auto g = knn_graph(testing::gaussian(7, 2, 1), 6);
  CHECK(g.edge_count() == 21);
}

TEST_CASE("knn_graph matches the brute-force sort then union") {
  for (unsigned long long seed = 0; seed < 5; ++seed) {
    const Eigen::MatrixXd Y = testing::gaussian(20, 3, seed);
    const auto nn = oracle::brute_knn(Y, 4);
    std::set<std::pair<Index, Index>> expect;
    for (int i = 0; i < 20; ++i) {
      for (int j : nn[static_cast<std::size_t>(i)]) expect.insert({std::min(i, j), std::max(i, j)});
    }
    const auto g = knn_graph(Y, 4);
    const auto got = g.edges();
    CHECK(std::set<std::pair<Index, Index>>(got.begin(), got.end()) == expect);
    for (Index i = 0; i < 20; ++i) {
      CHECK(g.neighbors(i).size() >= 4u);
      for (Index j : g.neighbors(i)) CHECK(g.has_edge(j, i));
    }
  }
}

TEST_CASE("knn_graph breaks ties toward the lower index") {
  // 0 is equidistant from 1 and 2; 2 prefers 3, so only 0's own choice decides.
  Eigen::MatrixXd Y(4, 1);
  Y << 0.0, -1.0, 1.0, 1.5;
  const auto g = knn_graph(Y, 1);
  CHECK(g.neighbors(0) == std::vector<Index>{1});
}

TEST_CASE("knn_graph rejects a bad k") {
  CHECK_THROWS_AS(knn_graph(testing::gaussian(4, 2, 0), 0), InvalidArgument);
  CHECK_THROWS_AS(knn_graph(testing::gaussian(4, 2, 0), 4), InvalidArgument);
}

TEST_CASE("acyclic_graph small cases") {
  Eigen::MatrixXd Y2(2, 1);
  Y2 << 0.0, 5.0;
  const auto g2 = acyclic_graph(Y2, 1);
  CHECK(g2.neighbors(0) == std::vector<Index>{1});
  CHECK(g2.neighbors(1).empty());

  Eigen::MatrixXd Y3(3, 1);
  Y3 << 0.0, 1.0, 2.0;
  const auto g3 = acyclic_graph(Y3, 1);
  CHECK(g3.neighbors(0) == std::vector<Index>{1});
  CHECK(g3.neighbors(1) == std::vector<Index>{2});
  CHECK(g3.neighbors(2).empty());
}

TEST_CASE("acyclic_graph matches the restricted sort and is lower-triangular") {
  const Eigen::MatrixXd Y = testing::gaussian(15, 3, 11);
  const auto g = acyclic_graph(Y, 3);
  for (Index i = 0; i < 15; ++i) {
    std::vector<std::pair<double, Index>> later;
    for (Index j = i + 1; j < 15; ++j) later.push_back({(Y.row(i) - Y.row(j)).squaredNorm(), j});
    std::sort(later.begin(), later.end());
    std::vector<Index> expect;
    for (std::size_t a = 0; a < std::min<std::size_t>(3, later.size()); ++a) expect.push_back(later[a].second);
    std::sort(expect.begin(), expect.end());
    CHECK(g.neighbors(i) == expect);
    for (Index j : g.neighbors(i)) CHECK(j > i);
  }
}

TEST_CASE("acyclic_graph with a random ordering relabels the rows") {
  const Eigen::MatrixXd Y = testing::gaussian(10, 2, 3);
  const auto order = random_ordering(10, 5);
  const auto g = acyclic_graph(Y, 2, order);
  CHECK(g.order() == order);
  Eigen::MatrixXd Yr(10, 2);
  for (Index r = 0; r < 10; ++r) Yr.row(r) = Y.row(order[static_cast<std::size_t>(r)]);
  CHECK(g.all_neighbors() == acyclic_graph(Yr, 2).all_neighbors());
}

TEST_CASE("heat_adjacency values") {
  Eigen::MatrixXd Y(3, 1);
  Y << 0.0, 0.0, 2.0;
  const NeighborGraph g = path3();
  const auto A = heat_adjacency(Y, g, 1.0).dense();
  CHECK(A(0, 1) == 1.0);                              // coincident
  CHECK(A(1, 2) == doctest::Approx(std::exp(-2.0)));  // d^2 = 4 = 2 sigma^2 * 2
  CHECK(heat_adjacency(Y, g, std::sqrt(2.0)).dense()(1, 2) == doctest::Approx(std::exp(-1.0)));
  CHECK(A(0, 2) == 0.0);

  const auto wide = heat_adjacency(testing::gaussian(6, 2, 0), complete(6), 1e6).dense();
  for (Index i = 0; i < 6; ++i) {
    for (Index j = 0; j < 6; ++j) {
      if (i != j) CHECK(std::abs(wide(i, j) - 1.0) < 1e-9);
    }
  }
}

TEST_CASE("heat_adjacency decreases with edge length") {
  const Eigen::MatrixXd Y = testing::gaussian(12, 2, 9);
  const auto g = knn_graph(Y, 3);
  const auto A = heat_adjacency(Y, g, 0.7).dense();
  std::vector<std::pair<double, double>> pairs;
  for (auto [i, j] : g.edges()) pairs.push_back({(Y.row(i) - Y.row(j)).squaredNorm(), A(i, j)});
  std::sort(pairs.begin(), pairs.end());
  for (std::size_t a = 1; a < pairs.size(); ++a) CHECK(pairs[a].second <= pairs[a - 1].second);
}

TEST_CASE("unit_adjacency and degree_matrix") {
  const auto Ac = unit_adjacency(complete(3));
  CHECK(Ac.dense() == Eigen::MatrixXd::Ones(3, 3) - Eigen::MatrixXd::Identity(3, 3));
  CHECK(degree_matrix(Ac).diagonal() == Eigen::Vector3d(2, 2, 2));

  const auto A0 = unit_adjacency(NeighborGraph(GraphKind::kUndirected, {{}, {}}));
  CHECK(A0.dense().isZero());
  CHECK(degree_matrix(A0).diagonal().isZero());

  const auto Ap = unit_adjacency(path3()).dense();
  CHECK(Ap(0, 1) == 1.0);
  CHECK(Ap(1, 2) == 1.0);
  CHECK(Ap(0, 2) == 0.0);

  Eigen::MatrixXd Y(3, 1);
  Y << 0.0, 1.0, 2.0;
  WeightedAdjacency W = unit_adjacency(path3());
  W.weights.coeffRef(0, 1) = W.weights.coeffRef(1, 0) = 0.5;
  W.weights.coeffRef(1, 2) = W.weights.coeffRef(2, 1) = 2.0;
  CHECK(degree_matrix(W).diagonal() == Eigen::Vector3d(0.5, 2.5, 2.0));
  const Eigen::MatrixXd L = laplacian_from_adjacency(W).dense();
  CHECK(L(1, 1) == 2.5);
  CHECK(L(1, 2) == -2.0);
}

TEST_CASE("laplacian_from_multipliers examples") {
  const NeighborGraph g2(GraphKind::kUndirected, {{1}, {0}});
  const std::vector<EdgeMultiplier> one{{0, 1, 1.0}};
  Eigen::Matrix2d expect2;
  expect2 << 1, -1, -1, 1;
  CHECK(laplacian_from_multipliers(g2, one).dense() == expect2);
  CHECK(laplacian_from_multipliers(g2, {}).dense().isZero());

  const std::vector<EdgeMultiplier> lam{{0, 1, 2.0}, {2, 1, 3.0}};
  Eigen::Matrix3d expect3;
  expect3 << 2, -2, 0, -2, 5, -3, 0, -3, 3;
  CHECK(laplacian_from_multipliers(path3(), lam).dense() == expect3);

  const std::vector<EdgeMultiplier> off{{0, 2, 1.0}};
  CHECK_THROWS_AS(laplacian_from_multipliers(path3(), off), InvalidArgument);
}

TEST_CASE("assembled Laplacians have zero row sums and nonnegative spectrum") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> unif(0.0, 3.0);
  for (int trial = 0; trial < 10; ++trial) {
    const auto pairs = oracle::random_connected_graph(25, 20, static_cast<unsigned long long>(trial));
    std::vector<std::vector<Index>> nb(25);
    for (auto [a, b] : pairs) {
      nb[static_cast<std::size_t>(a)].push_back(b);
      nb[static_cast<std::size_t>(b)].push_back(a);
    }
    for (auto& v : nb) std::sort(v.begin(), v.end());
    const NeighborGraph g(GraphKind::kUndirected, nb);
    Eigen::VectorXd values(g.edge_count());
    for (Index e = 0; e < values.size(); ++e) values(e) = unif(rng);
    const auto L = laplacian_from_edge_values(g, values);
    const Eigen::MatrixXd Ld = L.dense();
    CHECK((Ld * Eigen::VectorXd::Ones(25)).cwiseAbs().maxCoeff() <= 1e-10 * Ld.cwiseAbs().maxCoeff());
    CHECK(min_eig(Ld) >= -1e-10);
    CHECK(Eigen::MatrixXd(L.sparse()) == Ld);
  }
}

TEST_CASE("laplacian_from_factor examples") {
  FactorMatrix Z;
  Z.n = 3;
  Z.m.resize(3, 3);
  CHECK(laplacian_from_factor(Z).dense().isZero());

  FactorMatrix M;
  M.n = 2;
  M.m.resize(2, 2);
  M.m.insert(0, 0) = -1.0;
  M.m.insert(1, 0) = 1.0;
  Eigen::Matrix2d expect;
  expect << 1, -1, -1, 1;
  CHECK(laplacian_from_factor(M).dense() == expect);
}

TEST_CASE("laplacian_from_factor of random zero-sum columns is a PSD Laplacian") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> normal;
  std::uniform_int_distribution<int> pick(0, 11);
  for (int trial = 0; trial < 5; ++trial) {
    Eigen::MatrixXd D = Eigen::MatrixXd::Zero(12, 12);
    for (int c = 0; c < 12; ++c) {
      for (int a = 0; a < 3; ++a) D(pick(rng), c) = normal(rng);
      D(c, c) = 0.0;
      D(c, c) = -D.col(c).sum();
    }
    FactorMatrix M;
    M.n = 12;
    M.m = D.sparseView();
    CHECK(M.max_column_sum() < 1e-12);
    const Eigen::MatrixXd L = laplacian_from_factor(M).dense();
    CHECK((L * Eigen::VectorXd::Ones(12)).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(min_eig(L) >= -1e-10);
    CHECK(testing::max_rel(L, D * D.transpose()) < 1e-12);
  }
}

TEST_CASE("dense and sparse assembly agree bit for bit above the threshold") {
  const Index n = kSparseThreshold + 10;
  std::vector<std::vector<Index>> nb(static_cast<std::size_t>(n));
  for (Index i = 0; i + 1 < n; ++i) {
    nb[static_cast<std::size_t>(i)].push_back(i + 1);
    nb[static_cast<std::size_t>(i + 1)].push_back(i);
  }
  const NeighborGraph g(GraphKind::kUndirected, nb);
  const auto L = laplacian_from_edge_values(g, Eigen::VectorXd::LinSpaced(n - 1, 0.1, 2.0));
  CHECK(L.prefers_sparse());
  CHECK(Eigen::MatrixXd(L.sparse()) == L.dense());
}

TEST_CASE("components lists each connected piece") {
  const NeighborGraph g(GraphKind::kUndirected, {{1}, {0}, {}, {4}, {3}});
  const auto comps = g.components();
  REQUIRE(comps.size() == 3u);
  CHECK(comps[0] == std::vector<Index>{0, 1});
  CHECK(comps[1] == std::vector<Index>{2});
  CHECK(!g.connected());
}
