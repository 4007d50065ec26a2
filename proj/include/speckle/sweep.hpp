#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "speckle/estimators.hpp"
#include "speckle/stats.hpp"

namespace speckle {

// One Monte Carlo experiment: the cartesian product of the five grids, a
// fresh class signal and instance per trial, one estimate per trial.
struct SweepConfig {
  std::vector<int> n{64};
  std::vector<int> m{16};
  std::vector<int> L{32};
  std::vector<double> sigma_z{0.1};
  std::vector<int> k{2};
  double x_min = 0.5;
  double x_max = 2.0;
  int trials = 100;
  std::uint64_t seed = 1;
  std::string estimator = "mle_ascent";  // mle_ascent | net_search | sufficient_statistic
  OptimizerConfig optimizer;
  int net_levels = 33;
  bool shared_operators = false;
  int workers = 1;
  // Wall time is inherently nondeterministic, so the runtime column is only
  // measured when asked for; the default keeps CSV output byte-reproducible.
  bool timing = false;
  std::vector<double> fixed_signal;  // empty: resample x_o per trial
  std::string output = "sweep.csv";
  std::string trial_log;  // optional per-trial CSV
  std::vector<std::string> warnings;  // filled by validation
};

struct SweepRecord {
  int m = 0, n = 0, L = 0;
  double sigma_z = 0.0;
  int k = 0;
  std::string estimator;
  int trials = 0;
  double mean_mse = 0.0;
  double ci_half_width = 0.0;
  double predicted_rate = 0.0;
  double mean_runtime_ms = 0.0;
  std::string error;  // empty on success
};

struct TrialRecord {
  int cell = 0, trial = 0;
  double mse = 0.0;
};

// max(sigma_z^4, m^2, n^2) * k * log(n) / (m^2 * n * L)
double predicted_rate(int m, int n, int L, double sigma_z, int k);

// Parses the key = value config format (lists as [a, b, c], # comments).
// Throws ParseError naming the offending line/key, ValidationError listing
// every violation; regime warnings land in config.warnings.
SweepConfig parse_config(const std::string& path);
SweepConfig parse_config_text(const std::string& text);
void validate_config(SweepConfig& config);

std::vector<SweepRecord> run_sweep(const SweepConfig& config,
                                   std::vector<TrialRecord>* trial_log = nullptr);

// Exact CSV bytes for a record set (header + one line per cell).
std::string to_csv(const std::vector<SweepRecord>& records);

struct ComparisonRow {
  int L = 0;
  double mse_varying = 0.0, ci_varying = 0.0;
  double mse_shared = 0.0, ci_shared = 0.0;
  std::string error;
};

struct ComparisonReport {
  std::vector<ComparisonRow> rows;
  // First L where the shared-operator improvement per doubling of L drops
  // below half the varying-operator improvement; absent for short grids.
  std::optional<int> plateau_L;
};

// Matched sweeps with shared_operators off/on over the config's L grid.
// Requires single-valued m, n, k, sigma_z grids.
ComparisonReport compare_varying_unvarying(const SweepConfig& config);

}  // namespace speckle
