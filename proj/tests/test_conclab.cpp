#include <cmath>

#include "doctest.h"
#include "speckle/conclab.hpp"
#include "speckle/stats.hpp"
#include "support/oracles.hpp"

using namespace speckle;
using namespace speckle::conclab;

TEST_CASE("singular values: vacuous t = 0 bound and far tails") {
  SingularValueTailReport r = singular_value_tail_check(10, 100, {0.0, 5.0}, 2000, 1);
  CHECK(r.sigma_max.theoretical_bounds[0] == doctest::Approx(2.0));
  CHECK(r.sigma_max.violations == 0);
  CHECK(r.sigma_max.empirical_frequencies[1] == doctest::Approx(0.0));
  REQUIRE(r.sigma_min.has_value());
  CHECK(r.sigma_min->violations == 0);
  CHECK(r.sigma_min->empirical_frequencies[1] == doctest::Approx(0.0));
}

TEST_CASE("singular values: 1x1 matches the scalar normal tail") {
  const long trials = 20000;
  SingularValueTailReport r = singular_value_tail_check(1, 1, {0.0, 0.5}, trials, 2);
  for (std::size_t i = 0; i < 2; ++i) {
    double t = r.sigma_max.thresholds[i];
    double truth = 2.0 * normal_upper_tail(2.0 + t);
    double freq = r.sigma_max.empirical_frequencies[i];
    double se = std::sqrt(truth * (1.0 - truth) / trials);
    CHECK(std::abs(freq - truth) <= 3.0 * se);
  }
  CHECK(!r.sigma_min.has_value());
}

TEST_CASE("hanson-wright: identity, scalar, zero matrix") {
  const long trials = 20000;
  Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(8, 8);
  HansonWrightReport r = hanson_wright_check(eye, trials, {1.0, 2.0, 4.0, 8.0}, 3);
  // chi^2_8 - 8: mean 0, variance 16
  double se_mean = std::sqrt(r.theoretical_variance / trials);
  CHECK(std::abs(r.sample_mean) <= 3.0 * se_mean);
  CHECK(r.theoretical_variance == doctest::Approx(16.0));
  CHECK(r.sample_variance == doctest::Approx(16.0).epsilon(0.15));
  for (std::size_t i = 1; i < r.tails.empirical_frequencies.size(); ++i) {
    CHECK(r.tails.empirical_frequencies[i] <= r.tails.empirical_frequencies[i - 1]);
  }

  Eigen::MatrixXd one = Eigen::MatrixXd::Identity(1, 1);
  HansonWrightReport rs = hanson_wright_check(one, trials, {3.0}, 4);
  double truth = 2.0 * normal_upper_tail(2.0);  // P(g^2 > 4)
  double se = std::sqrt(truth * (1.0 - truth) / trials);
  CHECK(std::abs(rs.tails.empirical_frequencies[0] - truth) <= 3.0 * se);

  Eigen::MatrixXd zero = Eigen::MatrixXd::Zero(4, 4);
  HansonWrightReport rz = hanson_wright_check(zero, 500, {0.1, 1.0}, 5);
  CHECK(rz.sample_mean == 0.0);
  CHECK(rz.sample_variance == 0.0);
  CHECK(rz.tails.empirical_frequencies[0] == 0.0);
  CHECK(rz.tails.empirical_frequencies[1] == 0.0);
}

TEST_CASE("decoupling: degenerate and scalar closed forms") {
  DecouplingReport zero = decoupling_mean_check({0.0, 0.0}, 2, 2, 200, 6);
  CHECK(zero.sample_mean == 0.0);
  CHECK(zero.closed_form_mean == 0.0);
  CHECK(zero.mean_within_4_se);

  // n = m = L = 1, d = [1]: S = a^4, E S = 3 = 1 * 1 * (1 + 2)
  DecouplingReport scalar = decoupling_mean_check({1.0}, 1, 1, 40000, 7);
  CHECK(scalar.closed_form_mean == doctest::Approx(3.0));
  CHECK(scalar.mean_within_4_se);
}

TEST_CASE("decoupling closed form re-derived by brute force at small sizes") {
  // the guard the closed form must pass before the acceptance run trusts it
  struct Config {
    std::vector<double> d;
    int m, L;
  };
  for (const Config& c : {Config{{1.0, -2.0}, 2, 2}, Config{{0.5, 1.5, -1.0}, 3, 2},
                          Config{{2.0}, 3, 3}}) {
    DecouplingReport r = decoupling_mean_check(c.d, c.m, c.L, 60000, 11);
    CHECK(r.mean_within_4_se);
    // and with a widened window the two must really be close in relative terms
    CHECK(std::abs(r.sample_mean - r.closed_form_mean) <=
          0.05 * std::abs(r.closed_form_mean));
  }
}

TEST_CASE("decoupling lower-tail frequencies are reported and small") {
  DecouplingReport r = decoupling_mean_check({1.0, 2.0, 0.0, -1.0}, 3, 5, 20000, 8);
  CHECK(r.mean_within_4_se);
  REQUIRE(r.lower_tail_frequencies.size() == r.lower_tail_thresholds.size());
  for (std::size_t i = 1; i < r.lower_tail_frequencies.size(); ++i) {
    CHECK(r.lower_tail_frequencies[i] <= r.lower_tail_frequencies[i - 1]);
  }
}

TEST_CASE("inverse difference bound: deterministic lemma never violated") {
  InverseDifferenceReport r1 = inverse_difference_bound_check(1, 500, 9);
  CHECK(r1.violations == 0);
  InverseDifferenceReport r8 = inverse_difference_bound_check(8, 1000, 10);
  CHECK(r8.violations == 0);
  CHECK(r8.max_ratio <= 1.0 + 1e-9);

  // scalar instance of the lemma: B = 2, C = 4 gives equality
  double lhs = std::abs(1.0 / 2.0 - 1.0 / 4.0);
  double rhs = std::abs(2.0 - 4.0) / (2.0 * 4.0);
  CHECK(lhs == doctest::Approx(rhs));
}

TEST_CASE("observation norm: pure chi-square case") {
  // x_o = 0, sigma_z = 1: y~^T y~ is chi^2 with mL degrees of freedom
  const int m = 3, n = 4, L = 2;
  const long trials = 4000;
  Signal zero = Signal::unchecked(std::vector<double>(n, 0.0));
  ObservationNormReport r = observation_norm_check(m, n, L, 1.0, zero, trials, 12);
  double dof = static_cast<double>(m) * L;
  double se = std::sqrt(2.0 * dof / static_cast<double>(trials));
  CHECK(std::abs(r.sample_mean - dof) <= 3.0 * se);
  CHECK(r.conditional_mean == doctest::Approx(dof));
  // threshold is 2 m L here, so the event is chi^2_6 >= 12:
  // survival = exp(-6) (1 + 6 + 18) ~ 0.0620
  double truth = std::exp(-6.0) * 25.0;
  double freq_se = std::sqrt(truth * (1.0 - truth) / trials);
  CHECK(std::abs(r.exceed_frequency - truth) <= 3.0 * freq_se);
}

TEST_CASE("observation norm: scalar product-normal oracle") {
  // m = n = L = 1, x = 1, sigma_z = 0: y^2 = A^2 W^2,
  // threshold = 2 * (9/4) * (sqrt 1 + sqrt 1)^2 = 18
  const long trials = 40000;
  Signal one = Signal::unchecked({1.0});
  ObservationNormReport r = observation_norm_check(1, 1, 1, 0.0, one, trials, 13);
  CHECK(r.threshold == doctest::Approx(18.0));
  double truth = oracles::product_normal_square_tail(18.0);
  double se = std::sqrt(truth * (1.0 - truth) / trials);
  CHECK(std::abs(r.exceed_frequency - truth) <= 3.0 * se + 1e-4);
  CHECK(r.sample_mean == doctest::Approx(r.conditional_mean).epsilon(0.1));
}

TEST_CASE("observation norm: no exceedances at moderate scale") {
  Signal x = make_signal(std::vector<double>(32, 1.0), 0.5, 2.0, 1);
  ObservationNormReport r = observation_norm_check(8, 32, 4, 0.1, x, 2000, 14);
  CHECK(r.exceed_frequency == 0.0);
}
