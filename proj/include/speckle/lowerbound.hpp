#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "speckle/model.hpp"
#include "speckle/signal.hpp"

namespace speckle {

// Parameters of the two-level discretized class: [n] is split into n_div
// near-equal integer intervals and signals take values in
// {x_bar, x_bar + delta_r} with at most k pieces.
struct SeparatedSetSpec {
  int n = 0;
  int k = 0;
  int n_div = 0;
  double epsilon = 0.0;  // recorded exponent behind n_div = k * n^epsilon
  double delta_r = 0.0;
  double x_min = 0.0;
  double x_max = 0.0;
  double x_bar = 0.0;    // (x_min + x_max) / 2
  int k_prime = 1;       // max(1, floor(k/4))
};

// Validates and fills the derived fields. Throws InvalidArgument /
// InvalidDims on bad geometry (delta_r must lie in (0, (x_max-x_min)/2)).
SeparatedSetSpec make_separated_set_spec(int n, int k, int n_div, double epsilon,
                                         double delta_r, double x_min, double x_max);

// n_div = max(k, floor(k * n^epsilon)), capped at n.
int default_n_div(int n, int k, double epsilon);

// Balanced split of {0..n-1} into n_div integer intervals [first, last).
std::vector<std::pair<int, int>> interval_partition(int n, int n_div);

// All binary interval patterns (1 = high level) with at most k pieces when
// read as a function on [n]. Lexicographic order. Throws SearchSpaceTooLarge
// when 2^n_div exceeds the cap.
std::vector<std::vector<std::uint8_t>> finite_class_patterns(
    int n_div, int k, std::uint64_t enumeration_cap = (1ull << 22));

// Greedy maximal subset of the exactly-k-high patterns, seeded with the
// first-k-intervals-high pattern, keeping candidates that differ from every
// chosen pattern on at least k_prime intervals. Lexicographic candidate order.
std::vector<std::vector<std::uint8_t>> separated_patterns(
    const std::vector<std::vector<std::uint8_t>>& patterns, int k, int k_prime);

// Signals for a set of interval patterns under the spec's geometry.
std::vector<Signal> materialize_patterns(
    const std::vector<std::vector<std::uint8_t>>& patterns,
    const SeparatedSetSpec& spec);

std::vector<Signal> build_finite_class(const SeparatedSetSpec& spec,
                                       std::uint64_t enumeration_cap = (1ull << 22));

std::vector<Signal> build_separated_set(const std::vector<Signal>& finite_class,
                                        const SeparatedSetSpec& spec);

// Minimum pairwise Euclidean distance. Throws TooFewPoints for |set| < 2.
double separation_radius(const std::vector<Signal>& set);

struct FanoInputs {
  double alpha_r = 0.0;  // pairwise l2 separation
  double beta_r = 0.0;   // max pairwise KL divergence
  long long r = 0;       // set cardinality, >= 2
};

// (alpha_r / 2) * (1 - (beta_r + log 2) / log r), floored at zero.
double fano_bound(const FanoInputs& inputs);

// The conditioning factor of the default delta_r formula, evaluated with the
// event-restricted singular-value surrogates 3/2 (sqrt n + sqrt m) and
// 1/2 (sqrt n - sqrt m).
double delta_factor(int m, int n, double sigma_z, double x_min, double x_max);

// delta_r such that delta_r^2 = c_delta * Delta^{-2} * n log(r) / (m^2 L)
//                               * n_div / k.
double default_delta_r(int m, int n, int L, double sigma_z, double x_min,
                       double x_max, double c_delta, double log_r, int n_div, int k);

struct LowerBoundReport {
  long long r = 0;
  double alpha_r = 0.0;
  double beta_r = 0.0;
  double delta_r = 0.0;
  double bound = 0.0;  // alpha^2/(4n) * max(0, 1 - (beta + log 2)/log r)^2
  bool beta_within_tenth_log_r = false;
  bool delta_clamped = false;
};

struct LowerBoundOptions {
  double c_delta = 0.01;               // used when spec.delta_r <= 0 (auto)
  std::uint64_t enumeration_cap = (1ull << 22);
  double pair_cost_cap = 5e10;         // guard on r^2 * L * m^3
};

// Full pipeline for one operator draw: build the separated set, pick delta_r
// (from the spec or the default formula), evaluate exact pairwise KLs and
// the resulting numeric MSE lower bound.
LowerBoundReport evaluate_instance_lower_bound(std::uint64_t seed, int m, int n,
                                               int L, double sigma_z,
                                               SeparatedSetSpec spec,
                                               const LowerBoundOptions& opts = {});

// ((R/delta)^n, (2R/delta + 1)^n) for a Euclidean ball of radius R.
std::pair<double, double> covering_bounds(double radius, double delta, int n);

}  // namespace speckle
