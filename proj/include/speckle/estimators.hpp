#pragma once

#include <cstdint>
#include <vector>

#include "speckle/likelihood.hpp"
#include "speckle/model.hpp"
#include "speckle/signal.hpp"

namespace speckle {

struct OptimizerConfig {
  int max_iters = 200;
  double step_init = 0.5;
  double step_shrink = 0.5;  // in (0,1)
  double tol_grad = 1e-6;
  int restarts = 4;
  int project_every = 10;
};

// A finite level grid over [x_min, x_max] together with the piece budget.
// The grid spacing plays the role of the net radius; the theoretical
// x_max / n^5 radius is proof apparatus and never used computationally.
struct NetSpec {
  std::vector<double> level_grid;  // strictly increasing, inside the box
  int max_pieces = 1;
};

NetSpec uniform_net(int levels, double x_min, double x_max, int max_pieces);

// Least-squares projection onto signals with at most k pieces and levels in
// [x_min, x_max]. Exact dynamic program over segment boundaries; each segment
// takes its box-clamped mean. Ties resolved toward the lexicographically
// smallest output vector. Throws InvalidDims if k > n or k < 1.
Signal project_piecewise_constant(const std::vector<double>& v, int k,
                                  double x_min, double x_max);

struct AscentReport {
  double log_lik = 0.0;
  double final_grad_norm = 0.0;
  int iterations = 0;
};

// Multi-start projected gradient ascent on the log-likelihood: box clamp
// every step, piecewise-constant projection every cfg.project_every steps.
// Returns the best feasible signal visited across restarts (ties: smallest
// value sequence). When snap_grid is given, projected iterates are snapped to
// the grid and polished by single-level grid moves, so the search stays on
// the same candidate set as mle_net_search.
Signal mle_projected_ascent(const ModelInstance& instance,
                            const ObservationSet& obs, int k, double x_min,
                            double x_max, const OptimizerConfig& cfg,
                            const NetSpec* snap_grid = nullptr,
                            AscentReport* report = nullptr);

// Exhaustive maximizer of the log-likelihood over all signals with at most
// net.max_pieces pieces and levels on net.level_grid. Candidate count
// (partitions x level assignments) must stay within candidate_cap.
Signal mle_net_search(const ModelInstance& instance, const ObservationSet& obs,
                      const NetSpec& net, std::uint64_t candidate_cap = 10'000'000);

// Number of candidates mle_net_search would evaluate.
std::uint64_t net_search_candidate_count(int n, const NetSpec& net);

// Oversample (m >= n) estimator via the per-look statistic
// u_l = (A_l^T A_l)^{-1} A_l^T y_l: raw_i = sqrt(mean_l u_{l,i}^2), then
// piecewise-constant projection. Intended for sigma_z = 0.
Signal sufficient_statistic_estimate(const ModelInstance& instance,
                                     const ObservationSet& obs, int k,
                                     double x_min, double x_max);

}  // namespace speckle
