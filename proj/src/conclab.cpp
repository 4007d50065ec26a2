#include "speckle/conclab.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <limits>

#include "speckle/errors.hpp"
#include "speckle/model.hpp"
#include "speckle/random.hpp"

namespace speckle::conclab {

namespace {

Eigen::MatrixXd gaussian_matrix(const RandomStream& stream, int rows, int cols) {
  std::vector<double> draws =
      stream.normals(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols));
  Eigen::MatrixXd a(rows, cols);
  std::size_t idx = 0;
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) a(i, j) = draws[idx++];
  }
  return a;
}

double binomial_se(double p_hat, long trials) {
  double v = p_hat * (1.0 - p_hat) / static_cast<double>(trials);
  return std::sqrt(std::max(v, 1.0 / (static_cast<double>(trials) * trials)));
}

TailReport tabulate(const std::vector<double>& thresholds,
                    const std::vector<long>& exceed_counts,
                    const std::vector<double>& bounds, long trials) {
  TailReport report;
  report.thresholds = thresholds;
  report.theoretical_bounds = bounds;
  report.trials = trials;
  report.empirical_frequencies.resize(thresholds.size());
  for (std::size_t i = 0; i < thresholds.size(); ++i) {
    double freq = static_cast<double>(exceed_counts[i]) / static_cast<double>(trials);
    report.empirical_frequencies[i] = freq;
    if (bounds[i] < 1.0 && freq > bounds[i] + 3.0 * binomial_se(freq, trials)) {
      ++report.violations;
    }
  }
  return report;
}

}  // namespace

SingularValueTailReport singular_value_tail_check(int m, int n,
                                                  const std::vector<double>& t_values,
                                                  long trials, std::uint64_t seed) {
  if (trials < 1) throw InvalidArgument("singular_value_tail_check: trials must be >= 1");
  const double sm = std::sqrt(static_cast<double>(m));
  const double sn = std::sqrt(static_cast<double>(n));
  const bool track_min = m < n;

  std::vector<long> max_counts(t_values.size(), 0);
  std::vector<long> min_counts(t_values.size(), 0);
  for (long trial = 0; trial < trials; ++trial) {
    RandomStream stream{seed, static_cast<std::uint64_t>(trial), 0, StreamRole::mc_trial};
    Eigen::MatrixXd a = gaussian_matrix(stream, m, n);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
    double smax = svd.singularValues()(0);
    double smin = svd.singularValues()(svd.singularValues().size() - 1);
    for (std::size_t i = 0; i < t_values.size(); ++i) {
      if (smax > sn + sm + t_values[i]) ++max_counts[i];
      if (track_min && smin < sn - sm - t_values[i]) ++min_counts[i];
    }
  }

  std::vector<double> bounds(t_values.size());
  for (std::size_t i = 0; i < t_values.size(); ++i) {
    bounds[i] = 2.0 * std::exp(-0.5 * t_values[i] * t_values[i]);
  }

  SingularValueTailReport report;
  report.sigma_max = tabulate(t_values, max_counts, bounds, trials);
  if (track_min) report.sigma_min = tabulate(t_values, min_counts, bounds, trials);
  return report;
}

HansonWrightReport hanson_wright_check(const Eigen::MatrixXd& a_q, long trials,
                                       const std::vector<double>& t_values,
                                       std::uint64_t seed) {
  if (trials < 1) throw InvalidArgument("hanson_wright_check: trials must be >= 1");
  if (a_q.rows() != a_q.cols()) throw InvalidDims("hanson_wright_check: matrix must be square");
  const int n = static_cast<int>(a_q.rows());
  const double trace = a_q.trace();

  std::vector<long> counts(t_values.size(), 0);
  double sum = 0.0, sum_sq = 0.0;
  for (long trial = 0; trial < trials; ++trial) {
    RandomStream stream{seed, static_cast<std::uint64_t>(trial), 0, StreamRole::mc_trial};
    std::vector<double> draws = stream.normals(static_cast<std::size_t>(n));
    Eigen::Map<const Eigen::VectorXd> xi(draws.data(), n);
    double stat = xi.dot(a_q * xi) - trace;
    sum += stat;
    sum_sq += stat * stat;
    for (std::size_t i = 0; i < t_values.size(); ++i) {
      if (std::abs(stat) > t_values[i]) ++counts[i];
    }
  }

  // the paper's bound carries an untracked absolute constant inside the
  // exponent; the 2 exp(-t^2/2) column is a shape reference, never asserted
  std::vector<double> bounds(t_values.size());
  for (std::size_t i = 0; i < t_values.size(); ++i) {
    bounds[i] = 2.0 * std::exp(-0.5 * t_values[i] * t_values[i]);
  }
  HansonWrightReport report;
  report.tails = tabulate(t_values, counts, bounds, trials);
  report.tails.violations = 0;
  double mean = sum / static_cast<double>(trials);
  report.sample_mean = mean;
  report.sample_variance = sum_sq / static_cast<double>(trials) - mean * mean;
  Eigen::MatrixXd sym = 0.5 * (a_q + a_q.transpose());
  report.theoretical_variance = 2.0 * sym.squaredNorm();
  return report;
}

DecouplingReport decoupling_mean_check(const std::vector<double>& d, int m, int L,
                                       long trials, std::uint64_t seed) {
  if (trials < 1) throw InvalidArgument("decoupling_mean_check: trials must be >= 1");
  if (m < 1 || L < 1) throw InvalidDims("decoupling_mean_check: m, L must be >= 1");
  const int n = static_cast<int>(d.size());
  if (n < 1) throw InvalidDims("decoupling_mean_check: d must be nonempty");

  Eigen::Map<const Eigen::VectorXd> dv(d.data(), n);
  const double tr_d = dv.sum();
  const double d_norm2 = dv.squaredNorm();
  const double closed_form =
      static_cast<double>(L) * m * (tr_d * tr_d + (m + 1.0) * d_norm2);
  const double lower_center = static_cast<double>(L) * m * (m - 1.0) * d_norm2;

  std::vector<double> thresholds;
  for (double f : {0.05, 0.1, 0.2, 0.4}) thresholds.push_back(f * closed_form);

  std::vector<long> lower_counts(thresholds.size(), 0);
  double sum = 0.0, sum_sq = 0.0;
  for (long trial = 0; trial < trials; ++trial) {
    double s = 0.0;
    for (int l = 0; l < L; ++l) {
      RandomStream stream{seed, static_cast<std::uint64_t>(trial),
                          static_cast<std::uint64_t>(l), StreamRole::mc_trial};
      Eigen::MatrixXd a = gaussian_matrix(stream, m, n);
      s += (a * dv.asDiagonal() * a.transpose()).squaredNorm();
    }
    sum += s;
    sum_sq += s * s;
    for (std::size_t i = 0; i < thresholds.size(); ++i) {
      if (s < lower_center - thresholds[i]) ++lower_counts[i];
    }
  }

  DecouplingReport report;
  report.trials = trials;
  report.sample_mean = sum / static_cast<double>(trials);
  report.closed_form_mean = closed_form;
  double var = sum_sq / static_cast<double>(trials) - report.sample_mean * report.sample_mean;
  report.standard_error = std::sqrt(std::max(var, 0.0) / static_cast<double>(trials));
  double tol = 4.0 * report.standard_error;
  if (report.standard_error == 0.0) tol = 1e-12 * (1.0 + std::abs(closed_form));
  report.mean_within_4_se = std::abs(report.sample_mean - closed_form) <= tol;
  report.lower_bound_center = lower_center;
  report.lower_tail_thresholds = thresholds;
  report.lower_tail_frequencies.resize(thresholds.size());
  for (std::size_t i = 0; i < thresholds.size(); ++i) {
    report.lower_tail_frequencies[i] =
        static_cast<double>(lower_counts[i]) / static_cast<double>(trials);
  }
  return report;
}

InverseDifferenceReport inverse_difference_bound_check(int n, long trials,
                                                       std::uint64_t seed) {
  if (trials < 1) throw InvalidArgument("inverse_difference_bound_check: trials must be >= 1");
  if (n < 1) throw InvalidDims("inverse_difference_bound_check: n must be >= 1");

  InverseDifferenceReport report;
  report.trials = trials;
  for (long trial = 0; trial < trials; ++trial) {
    RandomStream sb{seed, static_cast<std::uint64_t>(trial), 0, StreamRole::mc_trial};
    RandomStream sc{seed, static_cast<std::uint64_t>(trial), 1, StreamRole::mc_trial};
    // shifted Wisharts keep sigma_min bounded away from zero
    Eigen::MatrixXd g1 = gaussian_matrix(sb, n, n);
    Eigen::MatrixXd g2 = gaussian_matrix(sc, n, n);
    Eigen::MatrixXd b = g1 * g1.transpose() / static_cast<double>(n) +
                        0.5 * Eigen::MatrixXd::Identity(n, n);
    Eigen::MatrixXd c = g2 * g2.transpose() / static_cast<double>(n) +
                        0.5 * Eigen::MatrixXd::Identity(n, n);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eb(b), ec(c);
    Eigen::MatrixXd diff_inv = b.inverse() - c.inverse();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ed(0.5 * (diff_inv + diff_inv.transpose()));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ebc(b - c);

    double lhs = ed.eigenvalues().cwiseAbs().maxCoeff();
    double smax_diff = ebc.eigenvalues().cwiseAbs().maxCoeff();
    double rhs = smax_diff / (eb.eigenvalues().minCoeff() * ec.eigenvalues().minCoeff());
    double ratio = (rhs == 0.0) ? (lhs == 0.0 ? 0.0 : std::numeric_limits<double>::infinity())
                                : lhs / rhs;
    report.max_ratio = std::max(report.max_ratio, ratio);
    if (lhs > rhs * (1.0 + 1e-9) + 1e-14) ++report.violations;
  }
  return report;
}

ObservationNormReport observation_norm_check(int m, int n, int L, double sigma_z,
                                             const Signal& x_max_signal, long trials,
                                             std::uint64_t seed) {
  if (trials < 1) throw InvalidArgument("observation_norm_check: trials must be >= 1");
  if (x_max_signal.size() != n) {
    throw DimensionMismatch("observation_norm_check: signal length != n");
  }
  double x_max = 0.0;
  for (double v : x_max_signal.values) x_max = std::max(x_max, std::abs(v));
  const double sm = std::sqrt(static_cast<double>(m));
  const double sn = std::sqrt(static_cast<double>(n));
  const double scale = sigma_z * sigma_z + 2.25 * (sn + sm) * (sn + sm) * x_max * x_max;
  const double threshold = 2.0 * static_cast<double>(m) * L * scale;

  Eigen::Map<const Eigen::VectorXd> x(x_max_signal.values.data(), n);

  long exceed = 0;
  double sum = 0.0;
  double cond_sum = 0.0;
  for (long trial = 0; trial < trials; ++trial) {
    auto [instance, obs] = generate_instance(mix64(seed, static_cast<std::uint64_t>(trial)),
                                             m, n, L, sigma_z, x_max_signal, false);
    double yty = 0.0;
    double cond = static_cast<double>(m) * L * sigma_z * sigma_z;
    for (int l = 0; l < L; ++l) {
      yty += obs.looks[static_cast<std::size_t>(l)].squaredNorm();
      cond += (instance.operators[static_cast<std::size_t>(l)] * x.asDiagonal()).squaredNorm();
    }
    sum += yty;
    cond_sum += cond;
    if (yty >= threshold) ++exceed;
  }

  ObservationNormReport report;
  report.trials = trials;
  report.threshold = threshold;
  report.exceed_frequency = static_cast<double>(exceed) / static_cast<double>(trials);
  report.sample_mean = sum / static_cast<double>(trials);
  report.conditional_mean = cond_sum / static_cast<double>(trials);
  return report;
}

}  // namespace speckle::conclab
