#pragma once

// Independent reference implementations used to freeze expected values.
// Everything here is deliberately brute force and shares no code with the
// library paths it checks.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

namespace oracles {

struct ProjectionResult {
  std::vector<double> values;
  double sse = std::numeric_limits<double>::infinity();
  bool unique_values = true;  // all optimal segmentations give these values
};

// Exhaustive search over every segmentation with at most k pieces. Segment
// levels are box-clamped means computed by direct summation.
inline ProjectionResult brute_force_projection(const std::vector<double>& v, int k,
                                               double x_min, double x_max) {
  const int n = static_cast<int>(v.size());
  ProjectionResult best;
  std::vector<std::vector<double>> optimal_outputs;

  // enumerate segmentations as sorted break positions in {1..n-1}
  std::vector<int> breaks;
  std::function<void(int)> recurse = [&](int next_break) {
    if (static_cast<int>(breaks.size()) + 1 <= k) {
      // evaluate current segmentation
      std::vector<int> bounds;
      bounds.push_back(0);
      for (int b : breaks) bounds.push_back(b);
      bounds.push_back(n);
      std::vector<double> out(static_cast<std::size_t>(n));
      double total = 0.0;
      // accumulate right-to-left so sums match suffix-recursion order
      std::vector<double> seg_costs;
      for (std::size_t s = 0; s + 1 < bounds.size(); ++s) {
        int lo = bounds[s], hi = bounds[s + 1];
        double sum = 0.0;
        for (int i = lo; i < hi; ++i) sum += v[static_cast<std::size_t>(i)];
        double level = std::clamp(sum / (hi - lo), x_min, x_max);
        double cost = 0.0;
        for (int i = lo; i < hi; ++i) {
          double d = v[static_cast<std::size_t>(i)] - level;
          cost += d * d;
          out[static_cast<std::size_t>(i)] = level;
        }
        seg_costs.push_back(cost);
      }
      for (auto it = seg_costs.rbegin(); it != seg_costs.rend(); ++it) total += *it;

      if (total < best.sse - 1e-12) {
        best.sse = total;
        best.values = out;
        optimal_outputs.clear();
        optimal_outputs.push_back(out);
      } else if (total <= best.sse + 1e-9) {
        best.sse = std::min(best.sse, total);
        optimal_outputs.push_back(out);
        if (std::lexicographical_compare(out.begin(), out.end(), best.values.begin(),
                                         best.values.end())) {
          best.values = out;
        }
      }
    }
    if (static_cast<int>(breaks.size()) + 1 >= k) return;
    for (int b = next_break; b <= n - 1; ++b) {
      breaks.push_back(b);
      recurse(b + 1);
      breaks.pop_back();
    }
  };
  recurse(1);

  for (const auto& out : optimal_outputs) {
    if (out != best.values) {
      best.unique_values = false;
      break;
    }
  }
  return best;
}

// All value vectors with at most k pieces and levels drawn from grid.
inline std::vector<std::vector<double>> enumerate_net(int n, int k,
                                                      const std::vector<double>& grid) {
  std::vector<std::vector<double>> out;
  std::vector<double> current(static_cast<std::size_t>(n));
  std::function<void(int, int)> fill = [&](int pos, int pieces_left) {
    for (double level : grid) {
      for (int end = pos + 1; end <= n; ++end) {
        if (end < n && pieces_left == 1) continue;  // must cover the rest
        for (int i = pos; i < end; ++i) current[static_cast<std::size_t>(i)] = level;
        if (end == n) {
          out.push_back(current);
        } else {
          fill(end, pieces_left - 1);
        }
      }
    }
  };
  fill(0, k);
  // distinct value vectors only (a shorter piece split can repeat a vector)
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// Central finite differences of a scalar function.
inline std::vector<double> finite_difference_gradient(
    const std::function<double(const std::vector<double>&)>& f,
    const std::vector<double>& x, double h) {
  std::vector<double> grad(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) {
    std::vector<double> hi = x, lo = x;
    hi[j] += h;
    lo[j] -= h;
    grad[j] = (f(hi) - f(lo)) / (2.0 * h);
  }
  return grad;
}

// Simple composite Simpson rule on [a, b].
inline double simpson(const std::function<double(double)>& f, double a, double b,
                      int intervals) {
  if (intervals % 2 != 0) ++intervals;
  double h = (b - a) / intervals;
  double acc = f(a) + f(b);
  for (int i = 1; i < intervals; ++i) {
    acc += f(a + i * h) * ((i % 2) ? 4.0 : 2.0);
  }
  return acc * h / 3.0;
}

inline double normal_upper_tail(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

// P(A^2 W^2 > c) for independent standard normals A, W, via quadrature over W.
inline double product_normal_square_tail(double c) {
  auto integrand = [c](double w) {
    if (w <= 0.0) return 0.0;
    double phi = std::exp(-0.5 * w * w) / std::sqrt(2.0 * M_PI);
    return 2.0 * normal_upper_tail(std::sqrt(c) / w) * phi;
  };
  return 2.0 * simpson(integrand, 1e-9, 12.0, 20000);
}

// Slope of an OLS fit through explicit normal equations (2x2 solve), used to
// cross-check the library's regression path.
inline double ols_slope_normal_equations(const std::vector<std::pair<double, double>>& pts) {
  double n = static_cast<double>(pts.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (auto [x, y] : pts) {
    double lx = std::log(x), ly = std::log(y);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  Eigen::Matrix2d a;
  a << n, sx, sx, sxx;
  Eigen::Vector2d b(sy, sxy);
  Eigen::Vector2d sol = a.fullPivLu().solve(b);
  return sol(1);
}

}  // namespace oracles
