#include "unfold/gplvm.hpp"

#include "unfold/bounded_lbfgs.hpp"
#include "unfold/error.hpp"
#include "unfold/spectral.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

namespace unfold::eval {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Problem {
  const DataMatrix& Ys;
  Eigen::MatrixXd R2;  // squared distances between rescaled inputs
  bool degenerate;
  double noise_floor;
};

Eigen::MatrixXd rbf_part(const Eigen::MatrixXd& R2, double variance, double lengthscale) {
  return variance * (-R2.array() / (2.0 * lengthscale * lengthscale)).exp().matrix();
}

// Negative log marginal likelihood and its gradient in log-hyperparameters.
// Full parameterization: (log var, log l, log bias, log noise); degenerate:
// (log bias, log noise).
double negative_evidence(const Problem& pb, const Eigen::VectorXd& theta, Eigen::VectorXd& grad) {
  const Index n = pb.Ys.rows();
  const double p = static_cast<double>(pb.Ys.cols());
  const bool full = !pb.degenerate;
  const double bias = std::exp(theta(full ? 2 : 0));
  const double noise = std::exp(theta(full ? 3 : 1));

  Eigen::MatrixXd Krbf;
  Eigen::MatrixXd K = Eigen::MatrixXd::Constant(n, n, bias);
  if (full) {
    Krbf = rbf_part(pb.R2, std::exp(theta(0)), std::exp(theta(1)));
    K += Krbf;
  }
  K.diagonal().array() += noise;

  Eigen::LLT<Eigen::MatrixXd> llt(K);
  if (llt.info() != Eigen::Success) return kInf;
  const double log_det = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
  const Eigen::MatrixXd alpha = llt.solve(pb.Ys);
  const double fit = pb.Ys.cwiseProduct(alpha).sum();
  const double value = 0.5 * fit + 0.5 * p * log_det + 0.5 * static_cast<double>(n) * p * std::log(2.0 * std::numbers::pi);
  if (!std::isfinite(value)) return kInf;

  // d(-log p)/dK = 1/2 (p K^-1 - alpha alpha^T).
  const Eigen::MatrixXd Kinv = llt.solve(Eigen::MatrixXd::Identity(n, n));
  const Eigen::MatrixXd A = 0.5 * (p * Kinv - alpha * alpha.transpose());
  grad.resize(theta.size());
  if (full) {
    const double l = std::exp(theta(1));
    grad(0) = A.cwiseProduct(Krbf).sum();
    grad(1) = A.cwiseProduct(Krbf.cwiseProduct(pb.R2)).sum() / (l * l);
  }
  grad(full ? 2 : 0) = bias * A.sum();
  grad(full ? 3 : 1) = noise * A.trace();
  return value;
}

}  // namespace

DataMatrix standardize(const DataMatrix& Y) {
  DataMatrix Ys = Y.rowwise() - Y.colwise().mean();
  const double n = static_cast<double>(Y.rows());
  for (Index c = 0; c < Ys.cols(); ++c) {
    const double sd = std::sqrt(Ys.col(c).squaredNorm() / n);
    if (sd > 0.0) {
      Ys.col(c) /= sd;
    } else {
      Ys.col(c).setZero();
    }
  }
  return Ys;
}

double gp_log_marginal(const DataMatrix& Ys, const Eigen::MatrixXd& X, const Eigen::Vector4d& hyper) {
  if (X.rows() != Ys.rows()) throw InvalidArgument("gp_log_marginal: X and Y row counts differ");
  Problem pb{Ys, spectral::squared_distances(X), false, 0.0};
  Eigen::VectorXd grad;
  const double v = negative_evidence(pb, hyper.array().log().matrix(), grad);
  if (!std::isfinite(v)) throw NumericalError("gp_log_marginal: kernel matrix is not positive definite");
  return -v;
}

GplvmScore gplvm_score(const DataMatrix& Y, const Eigen::MatrixXd& X, const GplvmScoreConfig& cfg) {
  if (X.rows() != Y.rows()) throw InvalidArgument("gplvm_score: X and Y row counts differ");
  if (cfg.restarts < 1) throw InvalidArgument("gplvm_score: need at least one restart");
  if (!(cfg.noise_floor > 0.0)) throw InvalidArgument("gplvm_score: noise floor must be positive");
  if (!X.allFinite()) throw InvalidArgument("gplvm_score: embedding has non-finite coordinates");

  const DataMatrix Ys = standardize(Y);
  const Eigen::MatrixXd Xc = X.rowwise() - X.colwise().mean();
  const double rms = X.size() > 0 ? std::sqrt(Xc.squaredNorm() / static_cast<double>(X.size())) : 0.0;
  const bool degenerate = !(rms > 0.0);
  Problem pb{Ys, degenerate ? Eigen::MatrixXd() : spectral::squared_distances(Xc / rms), degenerate,
             cfg.noise_floor};

  // Boxes in log space: variance, lengthscale, bias, noise.
  Eigen::Vector4d lo(std::log(1e-4), std::log(1e-3), std::log(1e-8), std::log(cfg.noise_floor));
  Eigen::Vector4d hi(std::log(1e4), std::log(1e3), std::log(1e4), std::log(1e2));
  Eigen::Vector4d start_lo(std::log(0.1), std::log(0.1), std::log(1e-3), std::log(1e-3));
  Eigen::Vector4d start_hi(std::log(10.0), std::log(10.0), std::log(1.0), std::log(1.0));
  Eigen::Vector4d first(0.0, 0.0, std::log(0.1), std::log(0.1));
  const Index dim = degenerate ? 2 : 4;
  const Index off = degenerate ? 2 : 0;

  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  optim::LbfgsOptions lopts;
  lopts.max_iters = cfg.max_iters;
  const optim::Objective objective = [&](const Eigen::VectorXd& t, Eigen::VectorXd& g) {
    return negative_evidence(pb, t, g);
  };

  GplvmScore best;
  best.value = -kInf;
  best.degenerate = degenerate;
  for (int r = 0; r < cfg.restarts; ++r) {
    Eigen::VectorXd x0(dim);
    for (Index k = 0; k < dim; ++k) {
      const Index h = k + off;
      x0(k) = r == 0 ? first(h) : start_lo(h) + unit(rng) * (start_hi(h) - start_lo(h));
    }
    optim::LbfgsResult res;
    try {
      res = optim::minimize_box(objective, x0, lo.tail(dim), hi.tail(dim), lopts);
    } catch (const NumericalError&) {
      continue;
    }
    if (-res.f > best.value) {
      best.value = -res.f;
      Eigen::Vector4d hyper = Eigen::Vector4d::Zero();
      for (Index k = 0; k < dim; ++k) hyper(k + off) = std::exp(res.x(k));
      best.hyper = hyper;
    }
  }
  if (!std::isfinite(best.value)) throw NumericalError("gplvm_score: no restart produced a finite likelihood");
  return best;
}

}  // namespace unfold::eval
