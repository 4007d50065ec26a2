#include "speckle/model.hpp"

#include "speckle/errors.hpp"

namespace speckle {

namespace {

Eigen::MatrixXd gaussian_matrix(const RandomStream& stream, int rows, int cols) {
  std::vector<double> draws =
      stream.normals(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols));
  Eigen::MatrixXd a(rows, cols);
  std::size_t idx = 0;
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) a(i, j) = draws[idx++];
  }
  return a;
}

Eigen::VectorXd gaussian_vector(const RandomStream& stream, int dim, double scale) {
  std::vector<double> draws = stream.normals(static_cast<std::size_t>(dim));
  Eigen::VectorXd v(dim);
  for (int i = 0; i < dim; ++i) v(i) = scale * draws[static_cast<std::size_t>(i)];
  return v;
}

}  // namespace

std::pair<ModelInstance, ObservationSet> generate_instance(
    std::uint64_t seed, int m, int n, int L, double sigma_z, const Signal& x_o,
    bool shared_operators, std::uint64_t trial) {
  if (m < 1 || n < 1 || L < 1) throw InvalidDims("generate_instance: m, n, L must be >= 1");
  if (sigma_z < 0.0) throw InvalidArgument("generate_instance: sigma_z must be >= 0");
  if (x_o.size() != n) throw DimensionMismatch("generate_instance: x_o length != n");

  ModelInstance instance;
  instance.m = m;
  instance.n = n;
  instance.L = L;
  instance.sigma_z = sigma_z;
  instance.shared_operators = shared_operators;
  instance.seed = seed;
  instance.operators.reserve(static_cast<std::size_t>(L));

  ObservationSet obs;
  obs.looks.reserve(static_cast<std::size_t>(L));
  obs.speckle.reserve(static_cast<std::size_t>(L));
  obs.additive.reserve(static_cast<std::size_t>(L));

  const Eigen::Map<const Eigen::VectorXd> x(x_o.values.data(), n);

  for (int l = 0; l < L; ++l) {
    RandomStream op_stream{seed, trial, static_cast<std::uint64_t>(l),
                           StreamRole::operator_entries};
    if (shared_operators) op_stream.look = 0;
    if (shared_operators && l > 0) {
      instance.operators.push_back(instance.operators.front());
    } else {
      instance.operators.push_back(gaussian_matrix(op_stream, m, n));
    }

    RandomStream w_stream{seed, trial, static_cast<std::uint64_t>(l), StreamRole::speckle};
    RandomStream z_stream{seed, trial, static_cast<std::uint64_t>(l), StreamRole::additive};
    Eigen::VectorXd w = gaussian_vector(w_stream, n, 1.0);
    Eigen::VectorXd z = gaussian_vector(z_stream, m, sigma_z);

    obs.looks.push_back(instance.operators.back() * x.cwiseProduct(w) + z);
    obs.speckle.push_back(std::move(w));
    obs.additive.push_back(std::move(z));
  }
  return {std::move(instance), std::move(obs)};
}

}  // namespace speckle
