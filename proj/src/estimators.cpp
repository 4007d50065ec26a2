#include "speckle/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "speckle/errors.hpp"

namespace speckle {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

Signal signal_from_values(std::vector<double> values, int k_budget) {
  Signal s;
  s.values = std::move(values);
  s.k_budget = k_budget;
  return s;
}

double mean_log_likelihood(const std::vector<double>& values, int k,
                           const ModelInstance& instance, const ObservationSet& obs) {
  return log_likelihood(signal_from_values(values, k), instance, obs) /
         static_cast<double>(instance.L);
}

// Deterministic argmax: higher value wins, exact ties go to the
// lexicographically smaller vector. Order-independent by construction.
struct BestCandidate {
  double value = kNegInf;
  std::vector<double> values;

  bool consider(double v, const std::vector<double>& vals) {
    if (values.empty() || v > value ||
        (v == value && std::lexicographical_compare(vals.begin(), vals.end(),
                                                    values.begin(), values.end()))) {
      value = v;
      values = vals;
      return true;
    }
    return false;
  }
};

std::vector<double> clamp_to_box(std::vector<double> v, double lo, double hi) {
  for (double& x : v) x = std::clamp(x, lo, hi);
  return v;
}

std::size_t nearest_grid_index(const std::vector<double>& grid, double v) {
  auto it = std::lower_bound(grid.begin(), grid.end(), v);
  if (it == grid.begin()) return 0;
  if (it == grid.end()) return grid.size() - 1;
  std::size_t hi = static_cast<std::size_t>(it - grid.begin());
  std::size_t lo = hi - 1;
  // exact midpoint goes to the lower level for determinism
  return (v - grid[lo] < grid[hi] - v) ? lo : (v - grid[lo] > grid[hi] - v) ? hi : lo;
}

std::vector<double> snap_to_grid(const std::vector<double>& v,
                                 const std::vector<double>& grid) {
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = grid[nearest_grid_index(grid, v[i])];
  return out;
}

struct Run {
  int begin = 0, end = 0;  // [begin, end)
};

std::vector<Run> runs_of(const std::vector<double>& v) {
  std::vector<Run> runs;
  int start = 0;
  for (int i = 1; i <= static_cast<int>(v.size()); ++i) {
    if (i == static_cast<int>(v.size()) ||
        v[static_cast<std::size_t>(i)] != v[static_cast<std::size_t>(i - 1)]) {
      runs.push_back({start, i});
      start = i;
    }
  }
  return runs;
}

// First-improvement local search over grid-valued signals: per-run level
// coordinate descent, boundary shifts, and (piece budget permitting) run
// splits. The candidate set stays identical to the net search's.
std::pair<std::vector<double>, double> grid_polish(std::vector<double> vals, double f,
                                                   const NetSpec& net, int k,
                                                   const ModelInstance& instance,
                                                   const ObservationSet& obs) {
  const int max_rounds = 200;
  auto try_candidate = [&](std::vector<double>& cand, double& best) {
    if (count_pieces(cand) > k) return false;
    double fc = mean_log_likelihood(cand, k, instance, obs);
    if (fc > best) {
      vals = cand;
      best = fc;
      return true;
    }
    return false;
  };

  for (int round = 0; round < max_rounds; ++round) {
    bool improved = false;
    std::vector<Run> runs = runs_of(vals);

    // level moves: any grid level for any run
    for (const Run& run : runs) {
      double current = vals[static_cast<std::size_t>(run.begin)];
      for (double level : net.level_grid) {
        if (level == current) continue;
        std::vector<double> cand = vals;
        for (int i = run.begin; i < run.end; ++i) cand[static_cast<std::size_t>(i)] = level;
        if (try_candidate(cand, f)) {
          improved = true;
          break;
        }
      }
      if (improved) break;
    }
    if (improved) continue;

    // boundary shifts between adjacent runs, jointly with level refits of the
    // two runs that share the boundary
    for (std::size_t b = 0; b + 1 < runs.size() && !improved; ++b) {
      const Run& left = runs[b];
      const Run& right = runs[b + 1];
      for (int shift : {-1, 0, +1}) {
        int boundary = left.end + shift;
        if (boundary <= left.begin || boundary >= right.end) continue;
        for (double left_level : net.level_grid) {
          for (double right_level : net.level_grid) {
            if (shift == 0 && left_level == vals[static_cast<std::size_t>(left.begin)] &&
                right_level == vals[static_cast<std::size_t>(right.begin)]) {
              continue;
            }
            std::vector<double> cand = vals;
            for (int i = left.begin; i < boundary; ++i) {
              cand[static_cast<std::size_t>(i)] = left_level;
            }
            for (int i = boundary; i < right.end; ++i) {
              cand[static_cast<std::size_t>(i)] = right_level;
            }
            if (try_candidate(cand, f)) {
              improved = true;
              break;
            }
          }
          if (improved) break;
        }
        if (improved) break;
      }
    }
    if (improved) continue;

    // splits: replace a prefix or suffix of one run with another level
    if (static_cast<int>(runs.size()) < k) {
      for (const Run& run : runs) {
        for (int split = run.begin + 1; split < run.end && !improved; ++split) {
          for (double level : net.level_grid) {
            if (level == vals[static_cast<std::size_t>(run.begin)]) continue;
            std::vector<double> prefix = vals;
            for (int i = run.begin; i < split; ++i) prefix[static_cast<std::size_t>(i)] = level;
            if (try_candidate(prefix, f)) {
              improved = true;
              break;
            }
            std::vector<double> suffix = vals;
            for (int i = split; i < run.end; ++i) suffix[static_cast<std::size_t>(i)] = level;
            if (try_candidate(suffix, f)) {
              improved = true;
              break;
            }
          }
        }
        if (improved) break;
      }
    }
    if (!improved) break;
  }
  return {std::move(vals), f};
}

}  // namespace

NetSpec uniform_net(int levels, double x_min, double x_max, int max_pieces) {
  if (levels < 1) throw InvalidArgument("uniform_net: need at least one level");
  NetSpec net;
  net.max_pieces = max_pieces;
  net.level_grid.resize(static_cast<std::size_t>(levels));
  if (levels == 1) {
    net.level_grid[0] = 0.5 * (x_min + x_max);
  } else {
    for (int i = 0; i < levels; ++i) {
      net.level_grid[static_cast<std::size_t>(i)] =
          x_min + (x_max - x_min) * static_cast<double>(i) / static_cast<double>(levels - 1);
    }
  }
  return net;
}

Signal mle_projected_ascent(const ModelInstance& instance, const ObservationSet& obs,
                            int k, double x_min, double x_max,
                            const OptimizerConfig& cfg, const NetSpec* snap_grid,
                            AscentReport* report) {
  const int n = instance.n;
  if (k < 1 || k > n) throw InvalidDims("mle_projected_ascent: need 1 <= k <= n");
  if (!(x_min < x_max)) throw InvalidArgument("mle_projected_ascent: x_min < x_max required");
  if (cfg.restarts < 1 || cfg.max_iters < 1 || cfg.project_every < 1 ||
      !(cfg.step_shrink > 0.0 && cfg.step_shrink < 1.0) || !(cfg.step_init > 0.0)) {
    throw InvalidArgument("mle_projected_ascent: invalid optimizer config");
  }

  const double invL = 1.0 / static_cast<double>(instance.L);
  BestCandidate best;
  int total_iters = 0;

  auto consider_feasible = [&](const std::vector<double>& vals, double mean_ll) {
    best.consider(mean_ll, vals);
  };

  for (int restart = 0; restart < cfg.restarts; ++restart) {
    std::vector<double> x;
    if (restart == 0) {
      x.assign(static_cast<std::size_t>(n), 0.5 * (x_min + x_max));
    } else {
      RandomStream init{instance.seed, static_cast<std::uint64_t>(restart), 0,
                        StreamRole::optimizer_init};
      x = project_piecewise_constant(init.uniforms(static_cast<std::size_t>(n), x_min, x_max),
                                     k, x_min, x_max)
              .values;
    }
    if (snap_grid) x = snap_to_grid(x, snap_grid->level_grid);

    LogLikEval eval = log_likelihood_with_gradient(signal_from_values(x, k), instance, obs);
    double fx = eval.value * invL;
    consider_feasible(x, fx);

    double step = cfg.step_init;
    for (int it = 1; it <= cfg.max_iters; ++it) {
      ++total_iters;
      double gnorm = 0.0;
      for (double g : eval.gradient) gnorm += g * g;
      gnorm = std::sqrt(gnorm) * invL;
      if (gnorm <= cfg.tol_grad) break;

      // backtracking line search on the per-look mean log-likelihood
      bool accepted = false;
      double s = step;
      std::vector<double> xn;
      double fn = kNegInf;
      while (s >= 1e-14) {
        xn = x;
        for (int j = 0; j < n; ++j) {
          xn[static_cast<std::size_t>(j)] += s * eval.gradient[static_cast<std::size_t>(j)] * invL;
        }
        xn = clamp_to_box(std::move(xn), x_min, x_max);
        fn = mean_log_likelihood(xn, k, instance, obs);
        if (fn > fx) {
          accepted = true;
          break;
        }
        s *= cfg.step_shrink;
      }
      if (!accepted) break;
      x = std::move(xn);
      fx = fn;
      step = std::min(s / cfg.step_shrink, cfg.step_init);

      if (it % cfg.project_every == 0) {
        std::vector<double> xp = project_piecewise_constant(x, k, x_min, x_max).values;
        if (snap_grid) xp = snap_to_grid(xp, snap_grid->level_grid);
        double fp = mean_log_likelihood(xp, k, instance, obs);
        consider_feasible(xp, fp);
        if (snap_grid) {
          auto [polished, fpol] = grid_polish(xp, fp, *snap_grid, k, instance, obs);
          consider_feasible(polished, fpol);
        }
        x = std::move(xp);
        fx = fp;
      }
      eval = log_likelihood_with_gradient(signal_from_values(x, k), instance, obs);
      fx = eval.value * invL;
    }

    // land on the class, then (on a grid) polish by single-level moves
    std::vector<double> xp = project_piecewise_constant(x, k, x_min, x_max).values;
    if (snap_grid) xp = snap_to_grid(xp, snap_grid->level_grid);
    double fp = mean_log_likelihood(xp, k, instance, obs);
    consider_feasible(xp, fp);
    if (snap_grid) {
      auto [polished, fpol] = grid_polish(xp, fp, *snap_grid, k, instance, obs);
      consider_feasible(polished, fpol);
    }
  }

  if (snap_grid) {  // the cross-restart winner gets one more local pass
    auto [polished, fpol] =
        grid_polish(best.values, best.value, *snap_grid, k, instance, obs);
    consider_feasible(polished, fpol);
  }

  Signal out = signal_from_values(best.values, k);
  if (report) {
    report->log_lik = best.value * static_cast<double>(instance.L);
    report->iterations = total_iters;
    std::vector<double> g = log_likelihood_gradient(out, instance, obs);
    double gnorm = 0.0;
    for (double gi : g) gnorm += gi * gi;
    report->final_grad_norm = std::sqrt(gnorm);
  }
  return out;
}

std::uint64_t net_search_candidate_count(int n, const NetSpec& net) {
  const double g = static_cast<double>(net.level_grid.size());
  double total = 0.0;
  double levels = 1.0;
  for (int p = 1; p <= std::min(net.max_pieces, n); ++p) {
    levels *= g;
    // C(n-1, p-1) partitions with exactly p pieces
    double combos = 1.0;
    for (int i = 0; i < p - 1; ++i) {
      combos *= static_cast<double>(n - 1 - i) / static_cast<double>(i + 1);
    }
    total += combos * levels;
    if (total > 1e18) return std::numeric_limits<std::uint64_t>::max();
  }
  return static_cast<std::uint64_t>(std::llround(total));
}

Signal mle_net_search(const ModelInstance& instance, const ObservationSet& obs,
                      const NetSpec& net, std::uint64_t candidate_cap) {
  const int n = instance.n;
  if (net.level_grid.empty()) throw InvalidArgument("mle_net_search: empty level grid");
  for (std::size_t i = 1; i < net.level_grid.size(); ++i) {
    if (!(net.level_grid[i] > net.level_grid[i - 1])) {
      throw InvalidArgument("mle_net_search: level grid must be strictly increasing");
    }
  }
  if (net.max_pieces < 1) throw InvalidArgument("mle_net_search: max_pieces must be >= 1");

  std::uint64_t count = net_search_candidate_count(n, net);
  if (count > candidate_cap) {
    throw SearchSpaceTooLarge("mle_net_search: " + std::to_string(count) +
                              " candidates exceed cap " + std::to_string(candidate_cap));
  }

  const int g = static_cast<int>(net.level_grid.size());
  BestCandidate best;
  std::vector<double> vals(static_cast<std::size_t>(n));

  for (int p = 1; p <= std::min(net.max_pieces, n); ++p) {
    // breakpoints b_1 < ... < b_{p-1} in {1..n-1}; piece i covers [b_{i-1}, b_i)
    std::vector<int> breaks(static_cast<std::size_t>(p - 1));
    for (int i = 0; i < p - 1; ++i) breaks[static_cast<std::size_t>(i)] = i + 1;

    while (true) {
      std::vector<int> bounds;
      bounds.push_back(0);
      for (int b : breaks) bounds.push_back(b);
      bounds.push_back(n);

      std::vector<int> level_idx(static_cast<std::size_t>(p), 0);
      while (true) {
        for (int piece = 0; piece < p; ++piece) {
          double lv = net.level_grid[static_cast<std::size_t>(level_idx[static_cast<std::size_t>(piece)])];
          for (int i = bounds[static_cast<std::size_t>(piece)];
               i < bounds[static_cast<std::size_t>(piece + 1)]; ++i) {
            vals[static_cast<std::size_t>(i)] = lv;
          }
        }
        double ll = log_likelihood(signal_from_values(vals, net.max_pieces), instance, obs);
        best.consider(ll, vals);

        // odometer, last piece fastest
        int pos = p - 1;
        while (pos >= 0 && level_idx[static_cast<std::size_t>(pos)] == g - 1) {
          level_idx[static_cast<std::size_t>(pos)] = 0;
          --pos;
        }
        if (pos < 0) break;
        ++level_idx[static_cast<std::size_t>(pos)];
      }

      // next breakpoint combination
      if (p == 1) break;
      int pos = p - 2;
      while (pos >= 0 && breaks[static_cast<std::size_t>(pos)] == n - 1 - (p - 2 - pos)) --pos;
      if (pos < 0) break;
      ++breaks[static_cast<std::size_t>(pos)];
      for (int i = pos + 1; i < p - 1; ++i) {
        breaks[static_cast<std::size_t>(i)] = breaks[static_cast<std::size_t>(i - 1)] + 1;
      }
    }
  }
  return signal_from_values(best.values, net.max_pieces);
}

Signal sufficient_statistic_estimate(const ModelInstance& instance,
                                     const ObservationSet& obs, int k,
                                     double x_min, double x_max) {
  const int m = instance.m;
  const int n = instance.n;
  if (m < n) throw InvalidDims("sufficient_statistic_estimate: requires m >= n");

  Eigen::VectorXd acc = Eigen::VectorXd::Zero(n);
  for (int l = 0; l < instance.L; ++l) {
    const Eigen::MatrixXd& a = instance.operators[static_cast<std::size_t>(l)];
    Eigen::MatrixXd ata = a.transpose() * a;
    Eigen::LLT<Eigen::MatrixXd> llt(ata);
    if (llt.info() != Eigen::Success) {
      throw SingularNormalMatrix("sufficient_statistic_estimate: A_l^T A_l singular at look " +
                                 std::to_string(l));
    }
    Eigen::VectorXd u = llt.solve(a.transpose() * obs.looks[static_cast<std::size_t>(l)]);
    acc += u.cwiseProduct(u);
  }
  std::vector<double> raw(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    raw[static_cast<std::size_t>(i)] = std::sqrt(acc(i) / static_cast<double>(instance.L));
  }
  return project_piecewise_constant(raw, k, x_min, x_max);
}

}  // namespace speckle
