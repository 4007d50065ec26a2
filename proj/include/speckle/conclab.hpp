#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <vector>

#include "speckle/signal.hpp"

namespace speckle::conclab {

// One empirical tail table: event frequencies per threshold next to the
// stated theoretical bound, plus the count of thresholds where the frequency
// exceeds bound + 3 binomial standard errors.
struct TailReport {
  std::vector<double> thresholds;
  std::vector<double> empirical_frequencies;
  std::vector<double> theoretical_bounds;
  long trials = 0;
  int violations = 0;
};

struct SingularValueTailReport {
  TailReport sigma_max;                 // events sigma_max(A) > sqrt n + sqrt m + t
  std::optional<TailReport> sigma_min;  // events sigma_min(A) < sqrt n - sqrt m - t (m < n)
};

SingularValueTailReport singular_value_tail_check(int m, int n,
                                                  const std::vector<double>& t_values,
                                                  long trials, std::uint64_t seed);

struct HansonWrightReport {
  TailReport tails;  // |xi^T A xi - tr A| > t, bound 2 exp(-t^2 / 2) not asserted
  double sample_mean = 0.0;
  double sample_variance = 0.0;
  double theoretical_variance = 0.0;  // 2 ||A_sym||_HS^2 for Gaussian inputs
};

HansonWrightReport hanson_wright_check(const Eigen::MatrixXd& a_q, long trials,
                                       const std::vector<double>& t_values,
                                       std::uint64_t seed);

struct DecouplingReport {
  double sample_mean = 0.0;
  double closed_form_mean = 0.0;  // L m [ (tr D)^2 + (m + 1) ||d||_2^2 ]
  double standard_error = 0.0;
  bool mean_within_4_se = false;
  double lower_bound_center = 0.0;  // L m (m - 1) ||d||_2^2
  std::vector<double> lower_tail_thresholds;
  std::vector<double> lower_tail_frequencies;  // freq of S < center - t
  long trials = 0;
};

DecouplingReport decoupling_mean_check(const std::vector<double>& d, int m, int L,
                                       long trials, std::uint64_t seed);

struct InverseDifferenceReport {
  long trials = 0;
  int violations = 0;
  double max_ratio = 0.0;  // max over trials of lhs / rhs, should stay <= 1
};

InverseDifferenceReport inverse_difference_bound_check(int n, long trials,
                                                       std::uint64_t seed);

struct ObservationNormReport {
  double threshold = 0.0;         // 2 m L [ sigma_z^2 + 9/4 (sqrt n + sqrt m)^2 x_max^2 ]
  double exceed_frequency = 0.0;  // freq of y~^T y~ >= threshold, expected ~ 0
  double sample_mean = 0.0;
  double conditional_mean = 0.0;  // average of sum_l tr(X A_l^T A_l X) + m L sigma_z^2
  long trials = 0;
};

ObservationNormReport observation_norm_check(int m, int n, int L, double sigma_z,
                                             const Signal& x_max_signal, long trials,
                                             std::uint64_t seed);

}  // namespace speckle::conclab
