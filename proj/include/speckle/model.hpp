#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <utility>
#include <vector>

#include "speckle/signal.hpp"

namespace speckle {

// Forward operators and dimensions of one multilook acquisition.
// operators holds exactly L matrices of shape m x n; when shared_operators is
// set, all entries are bit-identical copies of the first draw.
struct ModelInstance {
  int m = 0;
  int n = 0;
  int L = 0;
  double sigma_z = 0.0;
  std::vector<Eigen::MatrixXd> operators;
  bool shared_operators = false;
  std::uint64_t seed = 0;
};

// The L observed looks y_l, plus the retained noise draws so oracle tests can
// reconstruct y_l = A_l diag(x_o) w_l + z_l exactly.
struct ObservationSet {
  std::vector<Eigen::VectorXd> looks;
  std::vector<Eigen::VectorXd> speckle;
  std::vector<Eigen::VectorXd> additive;
};

// Draws operators (i.i.d. standard normal entries), speckle w_l ~ N(0, I_n)
// and additive z_l ~ N(0, sigma_z^2 I_m), then forms the looks. All draws are
// keyed by (seed, trial, look, role); regeneration is bit-exact.
std::pair<ModelInstance, ObservationSet> generate_instance(
    std::uint64_t seed, int m, int n, int L, double sigma_z, const Signal& x_o,
    bool shared_operators = false, std::uint64_t trial = 0);

}  // namespace speckle
