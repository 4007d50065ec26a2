#include "speckle/stats.hpp"

#include <cmath>

#include "speckle/errors.hpp"

namespace speckle {

SlopeFit fit_loglog_slope(const std::vector<std::pair<double, double>>& points) {
  if (points.size() < 3) throw InvalidArgument("fit_loglog_slope: need at least 3 points");
  const double n = static_cast<double>(points.size());
  double sx = 0.0, sy = 0.0;
  for (const auto& [x, y] : points) {
    if (!(x > 0.0) || !(y > 0.0)) {
      throw NonPositiveInput("fit_loglog_slope: coordinates must be positive");
    }
    sx += std::log(x);
    sy += std::log(y);
  }
  const double mx = sx / n;
  const double my = sy / n;
  double sxx = 0.0, sxy = 0.0;
  for (const auto& [x, y] : points) {
    double dx = std::log(x) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(y) - my);
  }
  if (sxx == 0.0) throw InvalidArgument("fit_loglog_slope: degenerate x grid");
  SlopeFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double rss = 0.0;
  for (const auto& [x, y] : points) {
    double r = std::log(y) - (fit.intercept + fit.slope * std::log(x));
    rss += r * r;
  }
  if (points.size() > 2) {
    fit.std_error = std::sqrt(rss / (n - 2.0) / sxx);
  }
  return fit;
}

MeanCi mean_ci(const std::vector<double>& samples) {
  MeanCi out;
  if (samples.empty()) return out;
  double sum = 0.0;
  for (double s : samples) sum += s;
  out.mean = sum / static_cast<double>(samples.size());
  if (samples.size() < 2) return out;
  double ss = 0.0;
  for (double s : samples) {
    double d = s - out.mean;
    ss += d * d;
  }
  double sd = std::sqrt(ss / (static_cast<double>(samples.size()) - 1.0));
  out.ci_half_width = 1.959963984540054 * sd / std::sqrt(static_cast<double>(samples.size()));
  return out;
}

double normal_upper_tail(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

}  // namespace speckle
