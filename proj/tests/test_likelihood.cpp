#include <cmath>

#include "doctest.h"
#include "speckle/errors.hpp"
#include "speckle/likelihood.hpp"
#include "support/oracles.hpp"

using namespace speckle;

namespace {

ModelInstance scalar_instance(double a, double sigma_z) {
  ModelInstance inst;
  inst.m = inst.n = inst.L = 1;
  inst.sigma_z = sigma_z;
  inst.operators.push_back(Eigen::MatrixXd::Constant(1, 1, a));
  return inst;
}

ObservationSet scalar_obs(double y) {
  ObservationSet obs;
  obs.looks.push_back(Eigen::VectorXd::Constant(1, y));
  return obs;
}

}  // namespace

TEST_CASE("factorize: scalar closed form and identity covariance") {
  ModelInstance inst = scalar_instance(1.0, 0.0);
  Signal x = Signal::unchecked({2.0});
  CovarianceFactorization f = factorize(x, inst);
  CHECK(f.covariance(0)(0, 0) == doctest::Approx(4.0));
  CHECK(f.log_det(0) == doctest::Approx(std::log(4.0)));

  Signal zero = Signal::unchecked({0.0, 0.0});
  auto [ident_inst, obs] = generate_instance(1, 4, 2, 3, 1.0, zero);
  (void)obs;
  CovarianceFactorization fi = factorize(zero, ident_inst);
  for (int l = 0; l < 3; ++l) {
    CHECK(fi.log_det(l) == doctest::Approx(0.0));
    CHECK((fi.covariance(l) - Eigen::MatrixXd::Identity(4, 4)).norm() ==
          doctest::Approx(0.0));
  }
}

TEST_CASE("factorize: rank-deficient covariance is rejected, not regularized") {
  Signal x = make_signal({1.0, 1.5}, 0.5, 2.0, 2);
  auto [inst, obs] = generate_instance(21, 5, 2, 1, 0.0, x);
  (void)obs;
  CHECK_THROWS_AS(factorize(x, inst), NotPositiveDefinite);
}

TEST_CASE("factorization solve matches the dense inverse") {
  Signal x = make_signal(std::vector<double>(16, 1.2), 0.5, 2.0, 1);
  auto [inst, obs] = generate_instance(31, 32, 16, 2, 0.3, x);
  (void)obs;
  CovarianceFactorization f = factorize(x, inst);
  for (int l = 0; l < 2; ++l) {
    Eigen::MatrixXd inv = f.covariance(l).inverse();
    Eigen::VectorXd b = Eigen::VectorXd::LinSpaced(32, -1.0, 1.0);
    CHECK((f.solve(l, b) - inv * b).norm() < 1e-9);
  }
}

TEST_CASE("log_likelihood: scalar value, zero case, additivity over looks") {
  ModelInstance inst = scalar_instance(1.0, 0.0);
  ObservationSet obs = scalar_obs(3.0);
  Signal x = Signal::unchecked({2.0});
  double expected = -std::log(4.0) - 9.0 / 4.0;  // ~ -3.636294
  CHECK(log_likelihood(x, inst, obs) == doctest::Approx(expected));

  Signal zero = Signal::unchecked({0.0, 0.0, 0.0});
  auto [zinst, zobs] = generate_instance(2, 3, 3, 2, 1.0, zero);
  for (auto& y : zobs.looks) y.setZero();
  CHECK(log_likelihood(zero, zinst, zobs) == doctest::Approx(0.0));

  // duplicated look doubles the value exactly
  Signal xs = make_signal({1.0, 1.4, 1.4}, 0.5, 2.0, 2);
  auto [one, oneobs] = generate_instance(17, 2, 3, 1, 0.5, xs);
  ModelInstance two = one;
  two.L = 2;
  two.operators.push_back(one.operators[0]);
  ObservationSet twoobs = oneobs;
  twoobs.looks.push_back(oneobs.looks[0]);
  CHECK(log_likelihood(xs, two, twoobs) == 2.0 * log_likelihood(xs, one, oneobs));
}

TEST_CASE("gradient: zero coordinate, scalar calculus, finite differences") {
  ModelInstance inst = scalar_instance(1.0, 0.0);
  ObservationSet obs = scalar_obs(3.0);
  // d/dx (-log x^2 - 9/x^2) at x = 2 is -1 + 9/4
  std::vector<double> g = log_likelihood_gradient(Signal::unchecked({2.0}), inst, obs);
  CHECK(g[0] == doctest::Approx(1.25));

  // a zero coordinate has zero gradient component
  Signal withzero = Signal::unchecked({0.0, 1.0, 1.5});
  auto [inst2, obs2] = generate_instance(33, 2, 3, 2, 0.5, withzero);
  std::vector<double> g2 = log_likelihood_gradient(withzero, inst2, obs2);
  CHECK(g2[0] == 0.0);

  // central finite differences at random interior points
  for (int rep = 0; rep < 3; ++rep) {
    RandomStream stream{static_cast<std::uint64_t>(100 + rep), 0, 0,
                        StreamRole::signal_levels};
    Signal x = sample_signal_class(stream, 6, 6, 0.6, 1.8);
    auto [inst3, obs3] = generate_instance(static_cast<std::uint64_t>(40 + rep), 4, 6,
                                           3, 0.5, x);
    std::vector<double> analytic = log_likelihood_gradient(x, inst3, obs3);
    auto f = [&](const std::vector<double>& v) {
      return log_likelihood(Signal::unchecked(v), inst3, obs3);
    };
    std::vector<double> numeric =
        oracles::finite_difference_gradient(f, x.values, 1e-5);
    for (int j = 0; j < 6; ++j) {
      double denom = std::max(1.0, std::abs(numeric[static_cast<std::size_t>(j)]));
      CHECK(std::abs(analytic[static_cast<std::size_t>(j)] -
                     numeric[static_cast<std::size_t>(j)]) /
                denom <=
            1e-5);
    }
  }
}

TEST_CASE("gradient vanishes at an interior maximizer") {
  // scalar MLE: x^2 = y^2 so x = 3 is stationary
  ModelInstance inst = scalar_instance(1.0, 0.0);
  ObservationSet obs = scalar_obs(3.0);
  std::vector<double> g = log_likelihood_gradient(Signal::unchecked({3.0}), inst, obs);
  CHECK(std::abs(g[0]) < 1e-12);
}

TEST_CASE("log_likelihood is invariant to coordinate sign flips") {
  Signal x = Signal::unchecked({0.9, 1.2, 1.7, 0.6});
  Signal flipped = Signal::unchecked({0.9, -1.2, 1.7, -0.6});
  auto [inst, obs] = generate_instance(55, 3, 4, 2, 0.4, x);
  CHECK(log_likelihood(x, inst, obs) == doctest::Approx(log_likelihood(flipped, inst, obs)));
}

TEST_CASE("gaussian_kl: identical laws, scalar closed form, nonnegativity") {
  Signal x = make_signal({1.0, 1.3}, 0.5, 2.0, 2);
  auto [inst, obs] = generate_instance(66, 2, 2, 2, 0.2, x);
  (void)obs;
  CHECK(gaussian_kl(x, x, inst) == doctest::Approx(0.0));

  // scalar covariances 1 and 2: KL = (log 2 - 1 + 1/2) / 2
  ModelInstance sc = scalar_instance(1.0, 0.0);
  double kl = gaussian_kl(Signal::unchecked({1.0}), Signal::unchecked({std::sqrt(2.0)}), sc);
  CHECK(kl == doctest::Approx(0.5 * (std::log(2.0) - 1.0 + 0.5)).epsilon(1e-9));
  CHECK(kl == doctest::Approx(0.096574).epsilon(1e-4));

  for (int rep = 0; rep < 10; ++rep) {
    RandomStream sa{static_cast<std::uint64_t>(rep), 0, 0, StreamRole::signal_levels};
    RandomStream sb{static_cast<std::uint64_t>(rep), 1, 0, StreamRole::signal_levels};
    Signal xi = sample_signal_class(sa, 5, 3, 0.5, 2.0);
    Signal xj = sample_signal_class(sb, 5, 3, 0.5, 2.0);
    auto [inst2, obs2] = generate_instance(static_cast<std::uint64_t>(rep), 3, 5, 2, 0.3, xi);
    (void)obs2;
    CHECK(gaussian_kl(xi, xj, inst2) >= 0.0);
  }
}

TEST_CASE("gaussian_kl matches the Monte Carlo log-density ratio") {
  RandomStream sa{5, 0, 0, StreamRole::signal_levels};
  RandomStream sb{5, 1, 0, StreamRole::signal_levels};
  Signal xi = sample_signal_class(sa, 3, 2, 0.5, 2.0);
  Signal xj = sample_signal_class(sb, 3, 2, 0.5, 2.0);
  auto [inst, obs] = generate_instance(8, 2, 3, 2, 0.4, xi);
  (void)obs;

  double kl = gaussian_kl(xi, xj, inst);

  CovarianceFactorization fi = factorize(xi, inst);
  CovarianceFactorization fj = factorize(xj, inst);
  std::vector<Eigen::LLT<Eigen::MatrixXd>> chol;
  for (int l = 0; l < inst.L; ++l) chol.emplace_back(fi.covariance(l));

  const int samples = 20000;
  double sum = 0.0, sum_sq = 0.0;
  for (int t = 0; t < samples; ++t) {
    double ratio = 0.0;
    for (int l = 0; l < inst.L; ++l) {
      RandomStream stream{909, static_cast<std::uint64_t>(t),
                          static_cast<std::uint64_t>(l), StreamRole::mc_trial};
      std::vector<double> gd = stream.normals(static_cast<std::size_t>(inst.m));
      Eigen::Map<const Eigen::VectorXd> g(gd.data(), inst.m);
      Eigen::VectorXd y = chol[static_cast<std::size_t>(l)].matrixL() * g;
      ratio += 0.5 * (fj.log_det(l) - fi.log_det(l)) +
               0.5 * (y.dot(fj.solve(l, y)) - y.dot(fi.solve(l, y)));
    }
    sum += ratio;
    sum_sq += ratio * ratio;
  }
  double mean = sum / samples;
  double se = std::sqrt((sum_sq / samples - mean * mean) / samples);
  CHECK(std::abs(kl - mean) <= 3.0 * se);
}
