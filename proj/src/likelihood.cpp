#include "speckle/likelihood.hpp"

#include <cmath>

#include "speckle/errors.hpp"

namespace speckle {

double CovarianceFactorization::total_log_det() const {
  double acc = 0.0;
  for (double d : log_dets_) acc += d;
  return acc;
}

Eigen::VectorXd CovarianceFactorization::solve(int l, const Eigen::VectorXd& b) const {
  return llt_[static_cast<std::size_t>(l)].solve(b);
}

Eigen::MatrixXd CovarianceFactorization::solve(int l, const Eigen::MatrixXd& b) const {
  return llt_[static_cast<std::size_t>(l)].solve(b);
}

Eigen::MatrixXd look_covariance(const Eigen::MatrixXd& a, const Signal& x,
                                double sigma_z) {
  const int m = static_cast<int>(a.rows());
  const int n = static_cast<int>(a.cols());
  if (x.size() != n) throw DimensionMismatch("look_covariance: signal length != cols(A)");
  Eigen::VectorXd x2(n);
  for (int j = 0; j < n; ++j) {
    double v = x.values[static_cast<std::size_t>(j)];
    x2(j) = v * v;
  }
  Eigen::MatrixXd cov = a * x2.asDiagonal() * a.transpose();
  cov.diagonal().array() += sigma_z * sigma_z;
  // symmetrize away rounding asymmetry before the Cholesky
  cov = 0.5 * (cov + cov.transpose()).eval();
  (void)m;
  return cov;
}

CovarianceFactorization factorize(const Signal& x, const ModelInstance& instance) {
  if (x.size() != instance.n) {
    throw DimensionMismatch("factorize: signal length != instance.n");
  }
  CovarianceFactorization f;
  f.dim_ = instance.m;
  f.llt_.reserve(static_cast<std::size_t>(instance.L));
  f.covariances_.reserve(static_cast<std::size_t>(instance.L));
  f.log_dets_.reserve(static_cast<std::size_t>(instance.L));
  for (int l = 0; l < instance.L; ++l) {
    Eigen::MatrixXd cov =
        look_covariance(instance.operators[static_cast<std::size_t>(l)], x,
                        instance.sigma_z);
    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() != Eigen::Success) {
      throw NotPositiveDefinite(
          "factorize: covariance of look " + std::to_string(l) +
          " is not positive definite (sigma_z = " + std::to_string(instance.sigma_z) +
          ", m = " + std::to_string(instance.m) + ", n = " + std::to_string(instance.n) + ")");
    }
    double log_det = 0.0;
    const auto& chol = llt.matrixLLT();
    for (int i = 0; i < instance.m; ++i) log_det += 2.0 * std::log(chol(i, i));
    f.llt_.push_back(std::move(llt));
    f.covariances_.push_back(std::move(cov));
    f.log_dets_.push_back(log_det);
  }
  return f;
}

double log_likelihood(const Signal& x, const ModelInstance& instance,
                      const ObservationSet& obs) {
  CovarianceFactorization f = factorize(x, instance);
  double ll = 0.0;
  for (int l = 0; l < instance.L; ++l) {
    const Eigen::VectorXd& y = obs.looks[static_cast<std::size_t>(l)];
    ll += -f.log_det(l) - y.dot(f.solve(l, y));
  }
  return ll;
}

std::vector<double> log_likelihood_gradient(const Signal& x,
                                            const ModelInstance& instance,
                                            const ObservationSet& obs) {
  CovarianceFactorization f = factorize(x, instance);
  const int n = instance.n;
  std::vector<double> grad(static_cast<std::size_t>(n), 0.0);
  for (int l = 0; l < instance.L; ++l) {
    const Eigen::MatrixXd& a = instance.operators[static_cast<std::size_t>(l)];
    const Eigen::VectorXd& y = obs.looks[static_cast<std::size_t>(l)];
    // Minv_a: columns M_l^{-1} a_{l,j}; s = M_l^{-1} y_l
    Eigen::MatrixXd minv_a = f.solve(l, a);
    Eigen::VectorXd s = f.solve(l, y);
    for (int j = 0; j < n; ++j) {
      double quad = a.col(j).dot(minv_a.col(j));
      double cross = y.dot(minv_a.col(j));
      double xj = x.values[static_cast<std::size_t>(j)];
      grad[static_cast<std::size_t>(j)] += -2.0 * xj * quad + 2.0 * xj * cross * cross;
    }
    (void)s;
  }
  return grad;
}

LogLikEval log_likelihood_with_gradient(const Signal& x,
                                        const ModelInstance& instance,
                                        const ObservationSet& obs) {
  CovarianceFactorization f = factorize(x, instance);
  const int n = instance.n;
  LogLikEval out;
  out.gradient.assign(static_cast<std::size_t>(n), 0.0);
  for (int l = 0; l < instance.L; ++l) {
    const Eigen::MatrixXd& a = instance.operators[static_cast<std::size_t>(l)];
    const Eigen::VectorXd& y = obs.looks[static_cast<std::size_t>(l)];
    Eigen::MatrixXd minv_a = f.solve(l, a);
    Eigen::VectorXd s = f.solve(l, y);
    out.value += -f.log_det(l) - y.dot(s);
    for (int j = 0; j < n; ++j) {
      double quad = a.col(j).dot(minv_a.col(j));
      double cross = y.dot(minv_a.col(j));
      double xj = x.values[static_cast<std::size_t>(j)];
      out.gradient[static_cast<std::size_t>(j)] +=
          -2.0 * xj * quad + 2.0 * xj * cross * cross;
    }
  }
  return out;
}

double gaussian_kl(const CovarianceFactorization& from,
                   const CovarianceFactorization& to) {
  if (from.looks() != to.looks() || from.dim() != to.dim()) {
    throw DimensionMismatch("gaussian_kl: factorizations of different shape");
  }
  const int m = from.dim();
  double kl = 0.0;
  for (int l = 0; l < from.looks(); ++l) {
    double trace = to.solve(l, from.covariance(l)).trace();
    kl += 0.5 * (to.log_det(l) - from.log_det(l) - m + trace);
  }
  return kl;
}

double gaussian_kl(const Signal& x_i, const Signal& x_j,
                   const ModelInstance& instance) {
  CovarianceFactorization fi = factorize(x_i, instance);
  CovarianceFactorization fj = factorize(x_j, instance);
  return gaussian_kl(fi, fj);
}

}  // namespace speckle
