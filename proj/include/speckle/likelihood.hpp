#pragma once

#include <Eigen/Dense>
#include <vector>

#include "speckle/model.hpp"
#include "speckle/signal.hpp"

namespace speckle {

/// Per-look covariance M_l(x) = sigma_z^2 I_m + A_l X^2 A_l^T held together
/// with its Cholesky factor and cached log-determinant. Log-dets and solves
/// go through the triangular factor; the dense inverse is never formed.
class CovarianceFactorization {
 public:
  int looks() const { return static_cast<int>(llt_.size()); }
  int dim() const { return dim_; }

  double log_det(int l) const { return log_dets_[static_cast<std::size_t>(l)]; }
  double total_log_det() const;

  Eigen::VectorXd solve(int l, const Eigen::VectorXd& b) const;
  Eigen::MatrixXd solve(int l, const Eigen::MatrixXd& b) const;

  /// The dense M_l, retained for trace computations and reconstruction checks.
  const Eigen::MatrixXd& covariance(int l) const {
    return covariances_[static_cast<std::size_t>(l)];
  }

  friend CovarianceFactorization factorize(const Signal& x,
                                           const ModelInstance& instance);

 private:
  int dim_ = 0;
  std::vector<Eigen::LLT<Eigen::MatrixXd>> llt_;
  std::vector<Eigen::MatrixXd> covariances_;
  std::vector<double> log_dets_;
};

/// The covariance of look l under signal x, sigma_z^2 I_m + A X^2 A^T.
Eigen::MatrixXd look_covariance(const Eigen::MatrixXd& a, const Signal& x,
                                double sigma_z);

/// Factorizes every look covariance. Throws NotPositiveDefinite when any
/// M_l(x) is not SPD (e.g. sigma_z = 0 with m > n); no silent regularization.
CovarianceFactorization factorize(const Signal& x, const ModelInstance& instance);

/// l(x) = sum_l [ -log det M_l(x) - y_l^T M_l(x)^{-1} y_l ].
double log_likelihood(const Signal& x, const ModelInstance& instance,
                      const ObservationSet& obs);

/// Component j: sum_l [ -2 x_j a_{l,j}^T M_l^{-1} a_{l,j}
///                      + 2 x_j (y_l^T M_l^{-1} a_{l,j})^2 ],
/// with a_{l,j} the j-th column of A_l.
std::vector<double> log_likelihood_gradient(const Signal& x,
                                            const ModelInstance& instance,
                                            const ObservationSet& obs);

struct LogLikEval {
  double value = 0.0;
  std::vector<double> gradient;
};

/// Value and gradient from a single factorization pass; what the optimizer
/// calls once per iteration.
LogLikEval log_likelihood_with_gradient(const Signal& x,
                                        const ModelInstance& instance,
                                        const ObservationSet& obs);

/// Exact KL divergence between the observation laws of x_i and x_j under the
/// same operators: sum_l KL(N(0, M_l(x_i)) || N(0, M_l(x_j))).
double gaussian_kl(const Signal& x_i, const Signal& x_j,
                   const ModelInstance& instance);

/// KL divergence from cached factorizations (used by the pairwise sweep of
/// the lower-bound pipeline, which would otherwise refactorize r^2 times).
double gaussian_kl(const CovarianceFactorization& from,
                   const CovarianceFactorization& to);

}  // namespace speckle
