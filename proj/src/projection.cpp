#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "speckle/errors.hpp"
#include "speckle/estimators.hpp"

namespace speckle {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Prefix sums give O(1) segment costs; level is the box-clamped mean.
// Constant segments short-circuit to the exact value and zero cost so the
// projection is an exact fixed point on its own output.
struct SegmentCosts {
  std::vector<double> s1;  // s1[i] = sum of v[0..i-1]
  std::vector<double> s2;
  std::vector<int> run_id;
  const std::vector<double>& v;
  double lo, hi;

  SegmentCosts(const std::vector<double>& values, double lo_, double hi_)
      : s1(values.size() + 1, 0.0),
        s2(values.size() + 1, 0.0),
        run_id(values.size(), 0),
        v(values),
        lo(lo_),
        hi(hi_) {
    for (std::size_t i = 0; i < v.size(); ++i) {
      s1[i + 1] = s1[i] + v[i];
      s2[i + 1] = s2[i] + v[i] * v[i];
      if (i > 0) run_id[i] = run_id[i - 1] + (v[i] != v[i - 1] ? 1 : 0);
    }
  }

  bool constant(int i, int j) const {
    return run_id[static_cast<std::size_t>(i)] == run_id[static_cast<std::size_t>(j)];
  }

  double level(int i, int j) const {  // segment v[i..j], inclusive
    if (constant(i, j)) return std::clamp(v[static_cast<std::size_t>(i)], lo, hi);
    double len = static_cast<double>(j - i + 1);
    double mean = (s1[static_cast<std::size_t>(j + 1)] - s1[static_cast<std::size_t>(i)]) / len;
    return std::clamp(mean, lo, hi);
  }

  double cost(int i, int j) const {
    if (constant(i, j)) {
      double c = level(i, j);
      double d = v[static_cast<std::size_t>(i)] - c;
      return static_cast<double>(j - i + 1) * d * d;
    }
    double len = static_cast<double>(j - i + 1);
    double a1 = s1[static_cast<std::size_t>(j + 1)] - s1[static_cast<std::size_t>(i)];
    double a2 = s2[static_cast<std::size_t>(j + 1)] - s2[static_cast<std::size_t>(i)];
    double c = level(i, j);
    return std::max(0.0, a2 - 2.0 * c * a1 + len * c * c);
  }
};

}  // namespace

Signal project_piecewise_constant(const std::vector<double>& v, int k,
                                  double x_min, double x_max) {
  const int n = static_cast<int>(v.size());
  if (n == 0) throw InvalidArgument("project_piecewise_constant: empty input");
  if (k < 1 || k > n) throw InvalidDims("project_piecewise_constant: need 1 <= k <= n");
  if (!(x_min < x_max)) throw InvalidArgument("project_piecewise_constant: x_min < x_max required");

  SegmentCosts seg(v, x_min, x_max);

  // f[i][p]: minimal cost of covering the suffix v[i..n-1] with <= p segments.
  std::vector<std::vector<double>> f(static_cast<std::size_t>(n + 1),
                                     std::vector<double>(static_cast<std::size_t>(k + 1), kInf));
  for (int p = 0; p <= k; ++p) f[static_cast<std::size_t>(n)][static_cast<std::size_t>(p)] = 0.0;
  for (int p = 1; p <= k; ++p) {
    for (int i = n - 1; i >= 0; --i) {
      double best = kInf;
      for (int j = i; j < n; ++j) {
        double c = seg.cost(i, j) + f[static_cast<std::size_t>(j + 1)][static_cast<std::size_t>(p - 1)];
        if (c < best) best = c;
      }
      f[static_cast<std::size_t>(i)][static_cast<std::size_t>(p)] = best;
    }
  }

  // Reconstruct the lexicographically smallest optimal output. Candidates
  // within a tiny cost window count as tied, so floating-point summation
  // order cannot flip a mathematical tie.
  const double tol = 1e-9 * (1.0 + std::abs(f[0][static_cast<std::size_t>(k)]));

  // memoized lex-min optimal tail per (i, p)
  std::vector<std::vector<int>> have(static_cast<std::size_t>(n + 1),
                                     std::vector<int>(static_cast<std::size_t>(k + 1), 0));
  std::vector<std::vector<std::vector<double>>> tail(
      static_cast<std::size_t>(n + 1),
      std::vector<std::vector<double>>(static_cast<std::size_t>(k + 1)));

  auto best_tail = [&](auto&& self, int i, int p) -> const std::vector<double>& {
    auto& memo = tail[static_cast<std::size_t>(i)][static_cast<std::size_t>(p)];
    if (have[static_cast<std::size_t>(i)][static_cast<std::size_t>(p)]) return memo;
    have[static_cast<std::size_t>(i)][static_cast<std::size_t>(p)] = 1;
    if (i == n) return memo;  // empty tail
    const double target = f[static_cast<std::size_t>(i)][static_cast<std::size_t>(p)];

    // fast path: unique optimal split
    int tied = 0, only_j = -1;
    for (int j = i; j < n; ++j) {
      double c = seg.cost(i, j) + f[static_cast<std::size_t>(j + 1)][static_cast<std::size_t>(p - 1)];
      if (c <= target + tol) {
        ++tied;
        only_j = j;
        if (tied > 1) break;
      }
    }
    if (tied == 1) {
      double lv = seg.level(i, only_j);
      memo.assign(static_cast<std::size_t>(only_j - i + 1), lv);
      const auto& rest = self(self, only_j + 1, p - 1);
      memo.insert(memo.end(), rest.begin(), rest.end());
      return memo;
    }

    std::vector<double> best;
    for (int j = i; j < n; ++j) {
      double c = seg.cost(i, j) + f[static_cast<std::size_t>(j + 1)][static_cast<std::size_t>(p - 1)];
      if (c > target + tol) continue;
      std::vector<double> cand(static_cast<std::size_t>(j - i + 1), seg.level(i, j));
      const auto& rest = self(self, j + 1, p - 1);
      cand.insert(cand.end(), rest.begin(), rest.end());
      if (best.empty() || std::lexicographical_compare(cand.begin(), cand.end(),
                                                       best.begin(), best.end())) {
        best = std::move(cand);
      }
    }
    memo = std::move(best);
    return memo;
  };

  std::vector<double> out = best_tail(best_tail, 0, k);
  Signal s;
  s.values = std::move(out);
  s.k_budget = k;
  return s;
}

}  // namespace speckle
