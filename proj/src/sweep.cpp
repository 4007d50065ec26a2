#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <mutex>
#include <sstream>
#include <thread>

#include "speckle/errors.hpp"
#include "speckle/sweep.hpp"

namespace speckle {

namespace {

struct Cell {
  int m, n, L, k;
  double sigma_z;
};

std::vector<Cell> enumerate_cells(const SweepConfig& config) {
  std::vector<Cell> cells;
  for (int m : config.m) {
    for (int n : config.n) {
      for (int L : config.L) {
        for (double s : config.sigma_z) {
          for (int k : config.k) cells.push_back({m, n, L, k, s});
        }
      }
    }
  }
  return cells;
}

Signal estimate_one(const SweepConfig& config, const Cell& cell,
                    const ModelInstance& instance, const ObservationSet& obs,
                    const Signal& truth) {
  if (config.estimator == "mle_ascent") {
    return mle_projected_ascent(instance, obs, cell.k, config.x_min, config.x_max,
                                config.optimizer);
  }
  if (config.estimator == "net_search") {
    NetSpec net = uniform_net(config.net_levels, config.x_min, config.x_max, cell.k);
    return mle_net_search(instance, obs, net);
  }
  if (config.estimator == "sufficient_statistic") {
    return sufficient_statistic_estimate(instance, obs, cell.k, config.x_min,
                                         config.x_max);
  }
  if (config.estimator == "truth") {  // test hook
    return truth;
  }
  throw ValidationError("unknown estimator '" + config.estimator + "'");
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

}  // namespace

std::vector<SweepRecord> run_sweep(const SweepConfig& config,
                                   std::vector<TrialRecord>* trial_log) {
  const std::vector<Cell> cells = enumerate_cells(config);
  const std::size_t trials = static_cast<std::size_t>(config.trials);

  struct CellState {
    std::vector<double> mses;
    std::vector<double> runtimes_ms;
    std::mutex error_mutex;
    std::string error;
  };
  std::vector<CellState> state(cells.size());
  for (auto& s : state) {
    s.mses.assign(trials, 0.0);
    s.runtimes_ms.assign(trials, 0.0);
  }

  const std::size_t total_tasks = cells.size() * trials;
  std::atomic<std::size_t> next_task{0};

  auto worker = [&]() {
    for (;;) {
      std::size_t task = next_task.fetch_add(1);
      if (task >= total_tasks) break;
      std::size_t cell_idx = task / trials;
      std::size_t trial = task % trials;
      const Cell& cell = cells[cell_idx];
      CellState& cs = state[cell_idx];
      {
        std::lock_guard<std::mutex> lock(cs.error_mutex);
        if (!cs.error.empty()) continue;
      }
      try {
        std::uint64_t cell_seed = mix64(config.seed, static_cast<std::uint64_t>(cell_idx));
        Signal truth =
            config.fixed_signal.empty()
                ? sample_signal_class(
                      RandomStream{cell_seed, static_cast<std::uint64_t>(trial), 0,
                                   StreamRole::signal_levels},
                      cell.n, cell.k, config.x_min, config.x_max)
                : make_signal(config.fixed_signal, config.x_min, config.x_max, cell.k);
        auto [instance, obs] =
            generate_instance(cell_seed, cell.m, cell.n, cell.L, cell.sigma_z, truth,
                              config.shared_operators, static_cast<std::uint64_t>(trial));
        auto t0 = std::chrono::steady_clock::now();
        Signal estimate = estimate_one(config, cell, instance, obs, truth);
        auto t1 = std::chrono::steady_clock::now();
        cs.mses[trial] = mse(estimate, truth);
        cs.runtimes_ms[trial] =
            std::chrono::duration<double, std::milli>(t1 - t0).count();
      } catch (const Error& e) {
        std::lock_guard<std::mutex> lock(cs.error_mutex);
        if (cs.error.empty()) cs.error = e.kind();
      }
    }
  };

  int thread_count = std::max(1, config.workers);
  if (thread_count == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(thread_count));
    for (int i = 0; i < thread_count; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  std::vector<SweepRecord> records;
  records.reserve(cells.size());
  for (std::size_t c = 0; c < cells.size(); ++c) {
    const Cell& cell = cells[c];
    SweepRecord rec;
    rec.m = cell.m;
    rec.n = cell.n;
    rec.L = cell.L;
    rec.sigma_z = cell.sigma_z;
    rec.k = cell.k;
    rec.estimator = config.estimator;
    rec.trials = config.trials;
    rec.predicted_rate = predicted_rate(cell.m, cell.n, cell.L, cell.sigma_z, cell.k);
    rec.error = state[c].error;
    if (rec.error.empty()) {
      MeanCi ci = mean_ci(state[c].mses);
      rec.mean_mse = ci.mean;
      rec.ci_half_width = ci.ci_half_width;
      if (config.timing) {
        double sum = 0.0;
        for (double t : state[c].runtimes_ms) sum += t;
        rec.mean_runtime_ms = sum / static_cast<double>(trials);
      }
      if (trial_log) {
        for (std::size_t t = 0; t < trials; ++t) {
          trial_log->push_back({static_cast<int>(c), static_cast<int>(t), state[c].mses[t]});
        }
      }
    }
    records.push_back(std::move(rec));
  }
  return records;
}

std::string to_csv(const std::vector<SweepRecord>& records) {
  std::ostringstream out;
  out << "m,n,L,sigma_z,k,estimator,trials,mean_mse,ci_half_width,predicted_rate,"
         "mean_runtime_ms,error\n";
  for (const auto& r : records) {
    out << r.m << ',' << r.n << ',' << r.L << ',' << format_double(r.sigma_z) << ','
        << r.k << ',' << r.estimator << ',' << r.trials << ',';
    if (r.error.empty()) {
      out << format_double(r.mean_mse) << ',' << format_double(r.ci_half_width) << ','
          << format_double(r.predicted_rate) << ',' << format_double(r.mean_runtime_ms)
          << ',';
    } else {
      out << ",," << format_double(r.predicted_rate) << ",,";
    }
    out << r.error << '\n';
  }
  return out.str();
}

ComparisonReport compare_varying_unvarying(const SweepConfig& config) {
  if (config.m.size() != 1 || config.n.size() != 1 || config.k.size() != 1 ||
      config.sigma_z.size() != 1) {
    throw ValidationError(
        "compare_varying_unvarying: m, n, k, sigma_z must be single-valued");
  }
  SweepConfig varying = config;
  varying.shared_operators = false;
  SweepConfig shared = config;
  shared.shared_operators = true;

  std::vector<SweepRecord> rv = run_sweep(varying);
  std::vector<SweepRecord> rs = run_sweep(shared);

  ComparisonReport report;
  for (std::size_t i = 0; i < rv.size(); ++i) {
    ComparisonRow row;
    row.L = rv[i].L;
    row.mse_varying = rv[i].mean_mse;
    row.ci_varying = rv[i].ci_half_width;
    row.mse_shared = rs[i].mean_mse;
    row.ci_shared = rs[i].ci_half_width;
    if (!rv[i].error.empty()) row.error = rv[i].error;
    if (!rs[i].error.empty()) {
      row.error = row.error.empty() ? rs[i].error : row.error + "/" + rs[i].error;
    }
    report.rows.push_back(row);
  }

  // improvement per doubling of L along the grid
  for (std::size_t i = 0; i + 1 < report.rows.size(); ++i) {
    const auto& a = report.rows[i];
    const auto& b = report.rows[i + 1];
    if (!a.error.empty() || !b.error.empty()) continue;
    if (b.L <= a.L) continue;
    double doublings = std::log2(static_cast<double>(b.L) / a.L);
    double impr_varying = (a.mse_varying - b.mse_varying) / doublings;
    double impr_shared = (a.mse_shared - b.mse_shared) / doublings;
    if (impr_shared < 0.5 * impr_varying) {
      report.plateau_L = b.L;
      break;
    }
  }
  return report;
}

}  // namespace speckle
