#pragma once

#include "unfold/graphs.hpp"
#include "unfold/types.hpp"

#include <Eigen/Core>

#include <memory>
#include <string>
#include <vector>

namespace unfold::models {

/// Optimizer bookkeeping attached to a fitted model.
struct FitInfo {
  int iterations = 0;
  bool converged = true;
  /// Largest KKT violation at exit, in the units of the fit's own tolerance test.
  double kkt_violation = 0.0;
  std::vector<std::string> warnings;
};

/// Gaussian random field over the n data points with precision
/// L + gamma I + diag(extra), independent across the p features.
///
/// The covariance is inverted on first use and cached; copies share the cache.
class GrfModel {
public:
  GrfModel() = default;
  GrfModel(graphs::Laplacian L, double gamma, Index p, double log_likelihood,
           Eigen::VectorXd extra = {});

  /// Attaches a lower-triangular factor with precision M M^T, where row r of
  /// M refers to original point order[r]. The covariance is then computed by
  /// triangular solves instead of factoring the assembled precision, which
  /// loses accuracy when the m_ii span many orders of magnitude.
  void set_factor(graphs::FactorMatrix factor, std::vector<Index> order);

  Index size() const { return laplacian_.size(); }
  const graphs::Laplacian& laplacian() const { return laplacian_; }
  double gamma() const { return gamma_; }
  const Eigen::VectorXd& extra() const { return extra_; }
  Index p() const { return p_; }
  double log_likelihood() const { return log_likelihood_; }

  Eigen::MatrixXd precision() const;
  /// (precision)^-1. Throws NumericalError if the precision is not PD.
  const Eigen::MatrixXd& covariance() const;

  FitInfo info;

private:
  struct Cache;

  graphs::Laplacian laplacian_;
  double gamma_ = 0.0;
  Eigen::VectorXd extra_;
  graphs::FactorMatrix factor_;
  std::vector<Index> factor_order_;
  Index p_ = 0;
  double log_likelihood_ = 0.0;
  std::shared_ptr<Cache> cache_;
};

/// Sum over the p columns of Y of the zero-mean Gaussian log density with the
/// given precision. Throws NumericalError if P is not PD.
double gaussian_log_likelihood(const DataMatrix& Y, const Eigen::MatrixXd& P);

/// (p/2) log det(L + gamma I) - (np/2) log 2 pi - 1/2 tr((L + gamma I) Y Y^T).
/// Uses a sparse Cholesky factor when L prefers sparse storage.
double meu_log_likelihood(const DataMatrix& Y, const graphs::Laplacian& L, double gamma);

/// CMDS on p H K H. The implied squared distances are the model's expected
/// squared distances, so coordinates come out in data units.
Embedding grf_embed(const GrfModel& model, Index q);

}  // namespace unfold::models
