#include "speckle/signal.hpp"

#include <cmath>
#include <sstream>

#include "speckle/errors.hpp"

namespace speckle {

int count_pieces(const std::vector<double>& v) {
  if (v.empty()) return 0;
  int pieces = 1;
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] != v[i - 1]) ++pieces;
  }
  return pieces;
}

int Signal::piece_count() const { return count_pieces(values); }

Signal Signal::unchecked(std::vector<double> values) {
  Signal s;
  s.values = std::move(values);
  return s;
}

Signal make_signal(std::vector<double> values, double x_min, double x_max,
                   std::optional<int> k_budget) {
  if (values.empty()) throw InvalidArgument("make_signal: empty value vector");
  if (!(x_min < x_max) || !(x_min > 0.0)) {
    throw InvalidArgument("make_signal: requires 0 < x_min < x_max");
  }
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(values[i] >= x_min) || !(values[i] <= x_max)) {
      std::ostringstream os;
      os << "make_signal: value " << values[i] << " at index " << i
         << " outside [" << x_min << ", " << x_max << "]";
      throw OutOfBox(os.str());
    }
  }
  if (k_budget) {
    if (*k_budget < 1) throw InvalidArgument("make_signal: k_budget must be >= 1");
    int pieces = count_pieces(values);
    if (pieces > *k_budget) {
      std::ostringstream os;
      os << "make_signal: " << pieces << " pieces exceed budget " << *k_budget;
      throw BudgetExceeded(os.str());
    }
  }
  Signal s;
  s.values = std::move(values);
  s.k_budget = k_budget;
  return s;
}

Signal sample_signal_class(const RandomStream& stream, int n, int k,
                           double x_min, double x_max) {
  if (k < 1 || k > n) throw InvalidDims("sample_signal_class: need 1 <= k <= n");
  RandomStream level_stream = stream;
  level_stream.role = StreamRole::signal_levels;
  RandomStream break_stream = stream;
  break_stream.role = StreamRole::signal_breaks;

  std::vector<double> levels = level_stream.uniforms(static_cast<std::size_t>(k),
                                                     x_min, x_max);
  std::vector<std::int64_t> breaks;
  if (k > 1) {
    breaks = break_stream.distinct_ints(static_cast<std::size_t>(k - 1), 1, n - 1);
  }
  breaks.push_back(n);

  std::vector<double> values(static_cast<std::size_t>(n));
  std::size_t piece = 0;
  for (int i = 0; i < n; ++i) {
    if (i >= breaks[piece]) ++piece;
    values[static_cast<std::size_t>(i)] = levels[piece];
  }
  return make_signal(std::move(values), x_min, x_max, k);
}

double mse(const Signal& estimate, const Signal& truth) {
  if (estimate.size() != truth.size()) {
    throw DimensionMismatch("mse: signals of different length");
  }
  double acc = 0.0;
  for (int i = 0; i < estimate.size(); ++i) {
    double d = estimate.values[static_cast<std::size_t>(i)] -
               truth.values[static_cast<std::size_t>(i)];
    acc += d * d;
  }
  return acc / static_cast<double>(truth.size());
}

}  // namespace speckle
