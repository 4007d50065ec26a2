#pragma once

#include <optional>
#include <vector>

#include "speckle/random.hpp"

namespace speckle {

// A length-n amplitude vector, optionally certified piecewise-constant with
// at most k_budget pieces. The dense values are authoritative; the budget is
// a certificate, not a compressed representation.
struct Signal {
  std::vector<double> values;
  std::optional<int> k_budget;

  int size() const { return static_cast<int>(values.size()); }
  int piece_count() const;

  // Test/experiment constructor that skips box validation (e.g. the all-zero
  // signal used by noise-free shape checks). Does not set a budget.
  static Signal unchecked(std::vector<double> values);
};

// Number of maximal constant runs of v; 0 for empty input.
int count_pieces(const std::vector<double>& v);

// Validates the box and (when given) the piece budget.
// Throws OutOfBox, BudgetExceeded, InvalidArgument.
Signal make_signal(std::vector<double> values, double x_min, double x_max,
                   std::optional<int> k_budget = std::nullopt);

// Draws a uniformly random member of the k-piece class: k-1 distinct
// breakpoints from {1..n-1} and k i.i.d. levels from U[x_min, x_max].
// Throws InvalidDims if k > n or k < 1.
Signal sample_signal_class(const RandomStream& stream, int n, int k,
                           double x_min, double x_max);

// ||estimate - truth||_2^2 / n. Throws DimensionMismatch.
double mse(const Signal& estimate, const Signal& truth);

}  // namespace speckle
