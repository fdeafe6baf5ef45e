#include <doctest.h>

#include "helpers.hpp"

#include "unfold/cli/generate.hpp"
#include "unfold/compare.hpp"
#include "unfold/error.hpp"
#include "unfold/gplvm.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

using namespace unfold;
using namespace unfold::eval;

namespace {

Eigen::MatrixXd permute_rows(const Eigen::MatrixXd& X, unsigned long long seed) {
  std::vector<Index> idx(static_cast<std::size_t>(X.rows()));
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<Index>(i);
  std::mt19937_64 rng(seed);
  std::shuffle(idx.begin(), idx.end(), rng);
  Eigen::MatrixXd out(X.rows(), X.cols());
  for (Index r = 0; r < X.rows(); ++r) out.row(r) = X.row(idx[static_cast<std::size_t>(r)]);
  return out;
}

// log N(y | 0, w x x^T + b 11^T + s I) at log-parameters t, through the
// rank-2 Woodbury and determinant identities.
double linear_evidence(const Eigen::VectorXd& y, const Eigen::VectorXd& x, const Eigen::Vector3d& t) {
  const Index n = y.size();
  Eigen::MatrixXd U(n, 2);
  U << x, Eigen::VectorXd::Ones(n);
  const double s = std::exp(t(2));
  const Eigen::Vector2d d(std::exp(t(0)), std::exp(t(1)));
  const Eigen::Matrix2d G = U.transpose() * U;
  Eigen::Matrix2d inner = G;
  inner.diagonal() += s * d.cwiseInverse();
  const Eigen::Vector2d Uy = U.transpose() * y;
  const double quad = (y.squaredNorm() - Uy.dot(inner.inverse() * Uy)) / s;
  Eigen::Matrix2d cap = Eigen::Matrix2d::Identity() + d.asDiagonal() * G / s;
  const double logdet = static_cast<double>(n) * std::log(s) + std::log(cap.determinant());
  return -0.5 * quad - 0.5 * logdet - 0.5 * static_cast<double>(n) * std::log(2.0 * std::numbers::pi);
}

// Grid search then cyclic golden-section refinement.
double max_linear_evidence(const Eigen::VectorXd& y, const Eigen::VectorXd& x) {
  Eigen::Vector3d best(0, 0, 0);
  double fbest = -1e300;
  for (double a = -10; a <= 10; a += 0.5) {
    for (double b = -20; b <= 5; b += 0.5) {
      for (double c = -16; c <= 2; c += 0.5) {
        const double f = linear_evidence(y, x, {a, b, c});
        if (f > fbest) {
          fbest = f;
          best = {a, b, c};
        }
      }
    }
  }
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  for (int sweep = 0; sweep < 20; ++sweep) {
    for (int k = 0; k < 3; ++k) {
      double lo = best(k) - 1.0, hi = best(k) + 1.0;
      for (int it = 0; it < 60; ++it) {
        Eigen::Vector3d u = best, v = best;
        u(k) = hi - phi * (hi - lo);
        v(k) = lo + phi * (hi - lo);
        if (linear_evidence(y, x, u) > linear_evidence(y, x, v)) {
          hi = v(k);
        } else {
          lo = u(k);
        }
      }
      best(k) = 0.5 * (lo + hi);
    }
  }
  return linear_evidence(y, x, best);
}

}  // namespace

TEST_CASE("standardize gives zero mean and unit population variance") {
  Eigen::MatrixXd Y = testing::gaussian(20, 3, 1) * 4.0;
  Y.col(2).setConstant(7.0);
  const auto Ys = standardize(Y);
  CHECK(Ys.colwise().mean().cwiseAbs().maxCoeff() < 1e-12);
  CHECK(Ys.col(0).squaredNorm() / 20.0 == doctest::Approx(1.0));
  CHECK(Ys.col(2).isZero());
}

TEST_CASE("gplvm_score prefers the true latent coordinates to a permutation") {
  int wins = 0;
  for (unsigned long long seed = 0; seed < 10; ++seed) {
    const auto ds = cli::generate("swiss_roll", 120, 0.0, seed);
    const double truth = gplvm_score(ds.Y, ds.truth).value;
    const double permuted = gplvm_score(ds.Y, permute_rows(ds.truth, seed + 100)).value;
    if (truth > permuted) ++wins;
  }
  CHECK(wins >= 9);
}

TEST_CASE("gplvm_score of a linear feature approaches the linear-Gaussian evidence") {
  // The kernel's variance also sets the prior variance of the constant
  // function, which costs about (1/2) log(n variance / noise) against the
  // linear model's free bias. The gap is a few nats, so it is small relative
  // to the evidence only once n is in the hundreds.
  const Index n = 500;
  std::mt19937_64 rng(2);
  std::normal_distribution<double> normal;
  Eigen::MatrixXd X(n, 1);
  Eigen::MatrixXd Y(n, 1);
  for (Index i = 0; i < n; ++i) {
    X(i, 0) = normal(rng);
    Y(i, 0) = 3.0 * X(i, 0) + 1.0 + 0.01 * normal(rng);
  }
  // The score standardizes Y and rescales X by its RMS after centering.
  const Eigen::VectorXd ys = standardize(Y).col(0);
  Eigen::VectorXd xs = X.col(0).array() - X.col(0).mean();
  xs /= std::sqrt(xs.squaredNorm() / static_cast<double>(n));
  const double oracle = max_linear_evidence(ys, xs);
  const auto full = gplvm_score(Y, X);
  const double score = full.value;
  CHECK(std::abs(score - oracle) <= 0.01 * std::abs(oracle));
}

TEST_CASE("duplicating every row keeps the ranking of two embeddings") {
  const auto ds = cli::generate("swiss_roll", 60, 0.0, 3);
  const Eigen::MatrixXd worse = permute_rows(ds.truth, 4);
  const bool before = gplvm_score(ds.Y, ds.truth).value > gplvm_score(ds.Y, worse).value;
  Eigen::MatrixXd Y2(120, ds.Y.cols()), T2(120, 2), W2(120, 2);
  Y2 << ds.Y, ds.Y;
  T2 << ds.truth, ds.truth;
  W2 << worse, worse;
  const bool after = gplvm_score(Y2, T2).value > gplvm_score(Y2, W2).value;
  CHECK(before == after);
}

TEST_CASE("gplvm_score is invariant to rotation of X") {
  const auto ds = cli::generate("s_curve", 80, 0.05, 5);
  const Eigen::MatrixXd R = Eigen::HouseholderQR<Eigen::MatrixXd>(testing::gaussian(2, 2, 6)).householderQ();
  const double a = gplvm_score(ds.Y, ds.truth).value;
  const double b = gplvm_score(ds.Y, ds.truth * R).value;
  CHECK(std::abs(a - b) <= 1e-3 * std::max(1.0, std::abs(a)));
}

TEST_CASE("more restarts never lower the score") {
  const auto ds = cli::generate("swiss_roll", 60, 0.1, 7);
  const Eigen::MatrixXd X = ds.truth + 0.5 * testing::gaussian(60, 2, 8);
  double last = -1e300;
  for (int r = 1; r <= 6; ++r) {
    GplvmScoreConfig cfg;
    cfg.restarts = r;
    const double v = gplvm_score(ds.Y, X, cfg).value;
    CHECK(v >= last);
    last = v;
  }
}

TEST_CASE("gplvm_score is deterministic and flags a degenerate embedding") {
  const auto ds = cli::generate("ring", 40, 0.05, 9);
  CHECK(gplvm_score(ds.Y, ds.truth).value == gplvm_score(ds.Y, ds.truth).value);
  const auto flat = gplvm_score(ds.Y, Eigen::MatrixXd::Constant(40, 2, 3.0));
  CHECK(flat.degenerate);
  CHECK(std::isfinite(flat.value));
  CHECK(flat.value < gplvm_score(ds.Y, ds.truth).value);
  CHECK_THROWS_AS(gplvm_score(ds.Y, Eigen::MatrixXd::Zero(39, 2)), InvalidArgument);
}

TEST_CASE("gp_log_marginal matches a direct Gaussian density") {
  const Eigen::MatrixXd X = testing::gaussian(10, 2, 10);
  const Eigen::MatrixXd Ys = standardize(testing::gaussian(10, 3, 11));
  const Eigen::Vector4d h(1.3, 0.8, 0.2, 0.05);
  Eigen::MatrixXd K(10, 10);
  for (Index i = 0; i < 10; ++i) {
    for (Index j = 0; j < 10; ++j) {
      K(i, j) = h(0) * std::exp(-(X.row(i) - X.row(j)).squaredNorm() / (2.0 * h(1) * h(1))) + h(2) + (i == j ? h(3) : 0.0);
    }
  }
  const Eigen::MatrixXd Kinv = K.inverse();
  const double logdet = std::log(K.determinant());
  double expect = 0.0;
  for (Index c = 0; c < 3; ++c) {
    expect += -0.5 * Ys.col(c).dot(Kinv * Ys.col(c)) - 0.5 * logdet - 5.0 * std::log(2.0 * std::numbers::pi);
  }
  CHECK(gp_log_marginal(Ys, X, h) == doctest::Approx(expect).epsilon(1e-10));
}

TEST_CASE("compare_methods: one row per method, failures recorded, deterministic") {
  const auto ds = cli::generate("swiss_roll", 80, 0.0, 12);
  MethodParams base;
  base.k = 8;
  const std::vector<std::string> methods{"pca", "le", "isomap", "nonexistent"};
  const auto a = compare_methods(ds.Y, methods, base);
  REQUIRE(a.rows.size() == 4u);
  CHECK(a.rows.back().method == "nonexistent");
  CHECK(!a.rows.back().score);
  CHECK(!a.rows.back().error.empty());
  for (std::size_t r = 0; r + 2 < a.rows.size(); ++r) CHECK(*a.rows[r].score >= *a.rows[r + 1].score);
  const auto b = compare_methods(ds.Y, methods, base);
  CHECK(a.to_csv(false) == b.to_csv(false));
  CHECK(a.to_text(false) == b.to_text(false));
  CHECK(a.to_csv(false).rfind("method,score,error\n", 0) == 0);
  CHECK(a.to_csv(true).find("runtime_seconds") != std::string::npos);
}
