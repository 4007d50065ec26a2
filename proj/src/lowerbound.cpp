#include "speckle/lowerbound.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "speckle/errors.hpp"
#include "speckle/likelihood.hpp"

namespace speckle {

namespace {

int pattern_runs(const std::vector<std::uint8_t>& p) {
  if (p.empty()) return 0;
  int runs = 1;
  for (std::size_t i = 1; i < p.size(); ++i) {
    if (p[i] != p[i - 1]) ++runs;
  }
  return runs;
}

int pattern_highs(const std::vector<std::uint8_t>& p) {
  int c = 0;
  for (auto b : p) c += (b != 0);
  return c;
}

int interval_disagreements(const std::vector<std::uint8_t>& a,
                           const std::vector<std::uint8_t>& b) {
  int c = 0;
  for (std::size_t i = 0; i < a.size(); ++i) c += (a[i] != b[i]);
  return c;
}

}  // namespace

SeparatedSetSpec make_separated_set_spec(int n, int k, int n_div, double epsilon,
                                         double delta_r, double x_min, double x_max) {
  if (n < 1 || k < 1) throw InvalidDims("separated set spec: n, k must be >= 1");
  if (n_div < k) throw InvalidDims("separated set spec: n_div must be >= k");
  if (n_div > n) throw InvalidDims("separated set spec: n_div must be <= n");
  if (!(x_min > 0.0 && x_min < x_max)) {
    throw InvalidArgument("separated set spec: requires 0 < x_min < x_max");
  }
  if (!(delta_r > 0.0)) {
    throw InvalidArgument("separated set spec: delta_r must be positive (degenerate "
                          "delta_r = 0 makes all signals coincide)");
  }
  if (!(delta_r < 0.5 * (x_max - x_min))) {
    throw InvalidArgument("separated set spec: delta_r must be < (x_max - x_min)/2");
  }
  SeparatedSetSpec spec;
  spec.n = n;
  spec.k = k;
  spec.n_div = n_div;
  spec.epsilon = epsilon;
  spec.delta_r = delta_r;
  spec.x_min = x_min;
  spec.x_max = x_max;
  spec.x_bar = 0.5 * (x_min + x_max);
  spec.k_prime = std::max(1, k / 4);
  return spec;
}

int default_n_div(int n, int k, double epsilon) {
  double v = static_cast<double>(k) * std::pow(static_cast<double>(n), epsilon);
  int n_div = static_cast<int>(std::floor(v));
  return std::min(n, std::max(k, n_div));
}

std::vector<std::pair<int, int>> interval_partition(int n, int n_div) {
  if (n_div < 1 || n_div > n) throw InvalidDims("interval_partition: need 1 <= n_div <= n");
  std::vector<std::pair<int, int>> out;
  out.reserve(static_cast<std::size_t>(n_div));
  for (int i = 0; i < n_div; ++i) {
    int first = static_cast<int>((static_cast<long long>(i) * n) / n_div);
    int last = static_cast<int>((static_cast<long long>(i + 1) * n) / n_div);
    out.emplace_back(first, last);
  }
  return out;
}

std::vector<std::vector<std::uint8_t>> finite_class_patterns(
    int n_div, int k, std::uint64_t enumeration_cap) {
  if (n_div < 1 || n_div > 62) throw InvalidDims("finite_class_patterns: need 1 <= n_div <= 62");
  std::uint64_t total = 1ull << n_div;
  if (total > enumeration_cap) {
    throw SearchSpaceTooLarge("finite_class_patterns: 2^" + std::to_string(n_div) +
                              " patterns exceed cap " + std::to_string(enumeration_cap));
  }
  std::vector<std::vector<std::uint8_t>> out;
  std::vector<std::uint8_t> p(static_cast<std::size_t>(n_div));
  for (std::uint64_t code = 0; code < total; ++code) {
    for (int i = 0; i < n_div; ++i) {
      p[static_cast<std::size_t>(i)] =
          static_cast<std::uint8_t>((code >> (n_div - 1 - i)) & 1ull);
    }
    if (pattern_runs(p) <= k) out.push_back(p);
  }
  return out;
}

std::vector<std::vector<std::uint8_t>> separated_patterns(
    const std::vector<std::vector<std::uint8_t>>& patterns, int k, int k_prime) {
  // candidate pool: exactly k high intervals, kept in lexicographic order
  std::vector<std::vector<std::uint8_t>> pool;
  for (const auto& p : patterns) {
    if (pattern_highs(p) == k) pool.push_back(p);
  }
  if (pool.empty()) return {};

  const int n_div = static_cast<int>(pool.front().size());
  std::vector<std::uint8_t> seed_pattern(static_cast<std::size_t>(n_div), 0);
  for (int i = 0; i < std::min(k, n_div); ++i) seed_pattern[static_cast<std::size_t>(i)] = 1;
  auto seed_it = std::find(pool.begin(), pool.end(), seed_pattern);
  if (seed_it != pool.end() && seed_it != pool.begin()) {
    std::rotate(pool.begin(), seed_it, seed_it + 1);
  }

  std::vector<std::vector<std::uint8_t>> chosen;
  for (const auto& cand : pool) {
    bool ok = true;
    for (const auto& c : chosen) {
      if (interval_disagreements(cand, c) < k_prime) {
        ok = false;
        break;
      }
    }
    if (ok) chosen.push_back(cand);
  }
  return chosen;
}

std::vector<Signal> materialize_patterns(
    const std::vector<std::vector<std::uint8_t>>& patterns,
    const SeparatedSetSpec& spec) {
  auto intervals = interval_partition(spec.n, spec.n_div);
  std::vector<Signal> out;
  out.reserve(patterns.size());
  for (const auto& p : patterns) {
    std::vector<double> values(static_cast<std::size_t>(spec.n), spec.x_bar);
    for (int i = 0; i < spec.n_div; ++i) {
      if (!p[static_cast<std::size_t>(i)]) continue;
      for (int j = intervals[static_cast<std::size_t>(i)].first;
           j < intervals[static_cast<std::size_t>(i)].second; ++j) {
        values[static_cast<std::size_t>(j)] = spec.x_bar + spec.delta_r;
      }
    }
    out.push_back(make_signal(std::move(values), spec.x_min, spec.x_max, spec.k));
  }
  return out;
}

std::vector<Signal> build_finite_class(const SeparatedSetSpec& spec,
                                       std::uint64_t enumeration_cap) {
  return materialize_patterns(finite_class_patterns(spec.n_div, spec.k, enumeration_cap),
                              spec);
}

namespace {

std::vector<std::uint8_t> pattern_of(const Signal& s, const SeparatedSetSpec& spec) {
  auto intervals = interval_partition(spec.n, spec.n_div);
  std::vector<std::uint8_t> p(static_cast<std::size_t>(spec.n_div));
  double threshold = spec.x_bar + 0.5 * spec.delta_r;
  for (int i = 0; i < spec.n_div; ++i) {
    p[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(
        s.values[static_cast<std::size_t>(intervals[static_cast<std::size_t>(i)].first)] >
        threshold);
  }
  return p;
}

}  // namespace

std::vector<Signal> build_separated_set(const std::vector<Signal>& finite_class,
                                        const SeparatedSetSpec& spec) {
  std::vector<std::vector<std::uint8_t>> patterns;
  patterns.reserve(finite_class.size());
  for (const auto& s : finite_class) patterns.push_back(pattern_of(s, spec));
  std::sort(patterns.begin(), patterns.end());
  return materialize_patterns(separated_patterns(patterns, spec.k, spec.k_prime), spec);
}

double separation_radius(const std::vector<Signal>& set) {
  if (set.size() < 2) throw TooFewPoints("separation_radius: need at least two signals");
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < set.size(); ++i) {
    for (std::size_t j = i + 1; j < set.size(); ++j) {
      double acc = 0.0;
      for (std::size_t t = 0; t < set[i].values.size(); ++t) {
        double d = set[i].values[t] - set[j].values[t];
        acc += d * d;
      }
      best = std::min(best, std::sqrt(acc));
    }
  }
  return best;
}

double fano_bound(const FanoInputs& inputs) {
  if (inputs.r < 2) throw InvalidArgument("fano_bound: r must be >= 2");
  if (!(inputs.alpha_r > 0.0)) throw InvalidArgument("fano_bound: alpha_r must be positive");
  if (inputs.beta_r < 0.0) throw InvalidArgument("fano_bound: beta_r must be nonnegative");
  double bracket = 1.0 - (inputs.beta_r + std::log(2.0)) / std::log(static_cast<double>(inputs.r));
  return 0.5 * inputs.alpha_r * std::max(0.0, bracket);
}

double delta_factor(int m, int n, double sigma_z, double x_min, double x_max) {
  double sm = std::sqrt(static_cast<double>(m));
  double sn = std::sqrt(static_cast<double>(n));
  double top = (sigma_z * sigma_z + x_max * x_max * 2.25 * (sn + sm) * (sn + sm)) *
               2.25 * (sn + sm) * (sn + sm);
  double bottom = sigma_z * sigma_z + x_min * x_min * 0.25 * (sn - sm) * (sn - sm);
  return top / (bottom * bottom) * 2.0 * x_max;
}

double default_delta_r(int m, int n, int L, double sigma_z, double x_min,
                       double x_max, double c_delta, double log_r, int n_div, int k) {
  if (!(c_delta > 0.0) || !(log_r > 0.0)) {
    throw InvalidArgument("default_delta_r: c_delta and log_r must be positive");
  }
  double delta = delta_factor(m, n, sigma_z, x_min, x_max);
  double dr2 = c_delta / (delta * delta) * static_cast<double>(n) * log_r /
               (static_cast<double>(m) * m * L) * static_cast<double>(n_div) /
               static_cast<double>(k);
  return std::sqrt(dr2);
}

LowerBoundReport evaluate_instance_lower_bound(std::uint64_t seed, int m, int n,
                                               int L, double sigma_z,
                                               SeparatedSetSpec spec,
                                               const LowerBoundOptions& opts) {
  if (spec.n != n) throw DimensionMismatch("evaluate_instance_lower_bound: spec.n != n");

  auto patterns = finite_class_patterns(spec.n_div, spec.k, opts.enumeration_cap);
  auto sep = separated_patterns(patterns, spec.k, spec.k_prime);
  const long long r = static_cast<long long>(sep.size());
  if (r < 2) {
    throw TooFewPoints("evaluate_instance_lower_bound: separated set has " +
                       std::to_string(r) + " point(s); need r >= 2");
  }

  LowerBoundReport report;
  report.r = r;
  const double log_r = std::log(static_cast<double>(r));

  if (!(spec.delta_r > 0.0)) {
    double dr = default_delta_r(m, n, L, sigma_z, spec.x_min, spec.x_max,
                                opts.c_delta, log_r, spec.n_div, spec.k);
    double cap = 0.5 * (spec.x_max - spec.x_min) * (1.0 - 1e-9);
    if (dr >= cap) {
      dr = cap;
      report.delta_clamped = true;
    }
    spec.delta_r = dr;
  }
  report.delta_r = spec.delta_r;
  spec = make_separated_set_spec(spec.n, spec.k, spec.n_div, spec.epsilon,
                                 spec.delta_r, spec.x_min, spec.x_max);

  std::vector<Signal> signals = materialize_patterns(sep, spec);
  report.alpha_r = separation_radius(signals);

  // paper's separation guarantee, checkable whenever intervals have >= 3 points
  if (n / spec.n_div >= 3) {
    double guaranteed = std::sqrt(static_cast<double>(spec.k_prime) *
                                  (static_cast<double>(n) / spec.n_div - 2.0)) *
                        spec.delta_r;
    if (report.alpha_r < guaranteed * (1.0 - 1e-12)) {
      throw Error("InternalCheckFailed",
                  "separation radius below the guaranteed lower bound");
    }
  }

  double pair_cost = 0.5 * static_cast<double>(r) * static_cast<double>(r - 1) *
                     static_cast<double>(L) * std::pow(static_cast<double>(m), 3);
  if (pair_cost > opts.pair_cost_cap) {
    throw SearchSpaceTooLarge("evaluate_instance_lower_bound: pairwise KL cost " +
                              std::to_string(pair_cost) + " exceeds cap");
  }

  Signal center = make_signal(
      std::vector<double>(static_cast<std::size_t>(n), spec.x_bar), spec.x_min,
      spec.x_max, 1);
  auto [instance, obs] = generate_instance(seed, m, n, L, sigma_z, center, false);
  (void)obs;  // the bound depends on the operators only

  std::vector<CovarianceFactorization> factors;
  factors.reserve(signals.size());
  for (const auto& s : signals) factors.push_back(factorize(s, instance));

  double beta = 0.0;
  for (std::size_t i = 0; i < factors.size(); ++i) {
    for (std::size_t j = i + 1; j < factors.size(); ++j) {
      beta = std::max(beta, std::max(gaussian_kl(factors[i], factors[j]),
                                     gaussian_kl(factors[j], factors[i])));
    }
  }
  report.beta_r = beta;
  report.beta_within_tenth_log_r = beta <= 0.1 * log_r;

  double bracket = std::max(0.0, 1.0 - (beta + std::log(2.0)) / log_r);
  report.bound = report.alpha_r * report.alpha_r / (4.0 * n) * bracket * bracket;
  return report;
}

std::pair<double, double> covering_bounds(double radius, double delta, int n) {
  if (!(radius > 0.0) || !(delta > 0.0)) {
    throw NonPositiveInput("covering_bounds: radius and delta must be positive");
  }
  if (n < 1) throw InvalidDims("covering_bounds: n must be >= 1");
  double lower = std::pow(radius / delta, n);
  double upper = std::pow(2.0 * radius / delta + 1.0, n);
  return {lower, upper};
}

}  // namespace speckle
