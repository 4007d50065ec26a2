#pragma once

#include <utility>
#include <vector>

namespace speckle {

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double std_error = 0.0;  // standard error of the slope
};

// Ordinary least squares on (log x, log y). Throws NonPositiveInput when any
// coordinate is <= 0 and InvalidArgument for fewer than 3 points.
SlopeFit fit_loglog_slope(const std::vector<std::pair<double, double>>& points);

struct MeanCi {
  double mean = 0.0;
  double ci_half_width = 0.0;  // 95%, normal approximation
};

MeanCi mean_ci(const std::vector<double>& samples);

// 1 - Phi(x) for the standard normal.
double normal_upper_tail(double x);

}  // namespace speckle
