#include "unfold/grf.hpp"

#include "unfold/error.hpp"
#include "unfold/spectral.hpp"

#include <Eigen/Cholesky>
#include <Eigen/SparseCholesky>

#include <cmath>
#include <mutex>
#include <numbers>

namespace unfold::models {

struct GrfModel::Cache {
  std::once_flag once;
  Eigen::MatrixXd covariance;
};

GrfModel::GrfModel(graphs::Laplacian L, double gamma, Index p, double log_likelihood,
                   Eigen::VectorXd extra)
    : laplacian_(std::move(L)),
      gamma_(gamma),
      extra_(std::move(extra)),
      p_(p),
      log_likelihood_(log_likelihood),
      cache_(std::make_shared<Cache>()) {
  if (gamma_ < 0.0) throw InvalidArgument("GrfModel: gamma must be nonnegative");
  if (extra_.size() != 0 && extra_.size() != laplacian_.size()) {
    throw InvalidArgument("GrfModel: extra diagonal has wrong size");
  }
}

Eigen::MatrixXd GrfModel::precision() const {
  Eigen::MatrixXd P = laplacian_.dense();
  P.diagonal().array() += gamma_;
  if (extra_.size() != 0) P.diagonal() += extra_;
  return P;
}

void GrfModel::set_factor(graphs::FactorMatrix factor, std::vector<Index> order) {
  if (factor.n != size() || static_cast<Index>(order.size()) != size() || !factor.lower_triangular) {
    throw InvalidArgument("GrfModel: factor must be lower triangular and match the model size");
  }
  factor_ = std::move(factor);
  factor_order_ = std::move(order);
  cache_ = std::make_shared<Cache>();
}

const Eigen::MatrixXd& GrfModel::covariance() const {
  if (!cache_) throw InvalidArgument("GrfModel: empty model");
  std::call_once(cache_->once, [this] {
    if (factor_.n > 0) {
      const Index n = factor_.n;
      const Eigen::MatrixXd M = factor_.dense();
      if ((M.diagonal().array() == 0.0).any()) throw NumericalError("GRF factor is singular");
      // (M M^T)^-1 = M^-T M^-1.
      const Eigen::MatrixXd Minv = M.triangularView<Eigen::Lower>().solve(Eigen::MatrixXd::Identity(n, n));
      const Eigen::MatrixXd Kr = Minv.transpose() * Minv;
      cache_->covariance.resize(n, n);
      for (Index b = 0; b < n; ++b) {
        for (Index a = 0; a < n; ++a) {
          cache_->covariance(factor_order_[static_cast<std::size_t>(a)], factor_order_[static_cast<std::size_t>(b)]) =
              Kr(a, b);
        }
      }
      return;
    }
    const Eigen::MatrixXd P = precision();
    Eigen::LLT<Eigen::MatrixXd> llt(P);
    if (llt.info() != Eigen::Success) throw NumericalError("GRF precision is not positive definite");
    cache_->covariance = llt.solve(Eigen::MatrixXd::Identity(P.rows(), P.cols()));
  });
  return cache_->covariance;
}

double gaussian_log_likelihood(const DataMatrix& Y, const Eigen::MatrixXd& P) {
  if (P.rows() != Y.rows() || P.cols() != Y.rows()) {
    throw InvalidArgument("gaussian_log_likelihood: precision does not match data");
  }
  Eigen::LLT<Eigen::MatrixXd> llt(P);
  if (llt.info() != Eigen::Success) throw NumericalError("precision is not positive definite");
  const double n = static_cast<double>(Y.rows());
  const double p = static_cast<double>(Y.cols());
  const double log_det = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
  const double trace = (P * Y).cwiseProduct(Y).sum();
  return 0.5 * p * log_det - 0.5 * n * p * std::log(2.0 * std::numbers::pi) - 0.5 * trace;
}

double meu_log_likelihood(const DataMatrix& Y, const graphs::Laplacian& L, double gamma) {
  if (L.size() != Y.rows()) throw InvalidArgument("meu_log_likelihood: Laplacian does not match data");
  if (!L.prefers_sparse()) {
    Eigen::MatrixXd P = L.dense();
    P.diagonal().array() += gamma;
    return gaussian_log_likelihood(Y, P);
  }
  Eigen::SparseMatrix<double> P = L.sparse();
  for (Index i = 0; i < P.rows(); ++i) P.coeffRef(i, i) += gamma;
  Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> llt(P);
  if (llt.info() != Eigen::Success) throw NumericalError("precision is not positive definite");
  const double n = static_cast<double>(Y.rows());
  const double p = static_cast<double>(Y.cols());
  const Eigen::SparseMatrix<double> factor = llt.matrixL();
  const Eigen::VectorXd diag = factor.diagonal();
  const double log_det = 2.0 * diag.array().log().sum();
  const double trace = (P * Y).cwiseProduct(Y).sum();
  return 0.5 * p * log_det - 0.5 * n * p * std::log(2.0 * std::numbers::pi) - 0.5 * trace;
}

Embedding grf_embed(const GrfModel& model, Index q) {
  const SimilarityMatrix B = static_cast<double>(model.p()) * spectral::center(model.covariance());
  Embedding out = spectral::cmds_embed(0.5 * (B + B.transpose()), q);
  out.warnings = model.info.warnings;
  return out;
}

}  // namespace unfold::models
