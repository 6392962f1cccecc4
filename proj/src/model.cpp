#include "clmslab/model.hpp"

#include <cmath>
#include <stdexcept>

namespace clmslab {

double NetworkScenario::distance(int k) const {
  const Point& p = node_positions.at(static_cast<std::size_t>(k));
  return std::hypot(p.x - fusion_position.x, p.y - fusion_position.y);
}

void NetworkScenario::validate() const {
  if (num_nodes < 1) throw std::invalid_argument("num_nodes must be >= 1");
  if (dim < 1) throw std::invalid_argument("dim must be >= 1");
  if (true_weights.size() != dim)
    throw std::invalid_argument("true_weights length must equal dim");
  if (static_cast<int>(node_positions.size()) != num_nodes)
    throw std::invalid_argument("node_positions size must equal num_nodes");
  if (!(tx_power > 0.0)) throw std::invalid_argument("tx_power must be > 0");
  if (!(path_loss_exp > 0.0))
    throw std::invalid_argument("path_loss_exp must be > 0");
  auto per_node = [this](const std::vector<double>& v, const char* name) {
    if (static_cast<int>(v.size()) != num_nodes)
      throw std::invalid_argument(std::string(name) + " must have one entry per node");
  };
  per_node(nominal_range, "nominal_range");
  per_node(meas_noise_var, "meas_noise_var");
  per_node(link_noise_var, "link_noise_var");
  per_node(fading_var, "fading_var");
  per_node(regressor_corr, "regressor_corr");
  for (int k = 0; k < num_nodes; ++k) {
    if (!(nominal_range[k] > 0.0))
      throw std::invalid_argument("nominal_range must be > 0");
    if (meas_noise_var[k] < 0.0)
      throw std::invalid_argument("meas_noise_var must be >= 0");
    if (link_noise_var[k] < 0.0)
      throw std::invalid_argument("link_noise_var must be >= 0");
    if (!(fading_var[k] > 0.0))
      throw std::invalid_argument("fading_var must be > 0");
    if (regressor_corr[k] < 0.0 || regressor_corr[k] >= 1.0)
      throw std::invalid_argument("regressor_corr must lie in [0,1)");
    if (!(distance(k) > 0.0))
      throw std::invalid_argument("node coincides with the fusion center");
  }
  if (chan_est_err_var < 0.0)
    throw std::invalid_argument("chan_est_err_var must be >= 0");
  if (fading_corr < 0.0 || fading_corr >= 1.0)
    throw std::invalid_argument("fading_corr must lie in [0,1)");
}

Mat build_regressor_covariance(double eta, int dim) {
  if (eta < 0.0 || eta >= 1.0)
    throw std::invalid_argument("regressor correlation must lie in [0,1)");
  if (dim < 1) throw std::invalid_argument("dim must be >= 1");
  Mat r(dim, dim);
  for (int n = 0; n < dim; ++n)
    for (int m = 0; m < dim; ++m)
      r(n, m) = std::pow(eta, std::abs(m - n));
  return r;
}

RegressorSampler::RegressorSampler(const Mat& covariance) {
  Eigen::LLT<Mat> llt(covariance);
  if (llt.info() != Eigen::Success)
    throw std::invalid_argument("regressor covariance is not positive definite");
  // R = L L^*; with u = g L^* we get E[u^* u] = L L^* = R.
  factor_ = llt.matrixL().adjoint();
}

RowVec RegressorSampler::sample(Rng& rng) const {
  const int m = dim();
  RowVec g(m);
  for (int j = 0; j < m; ++j) g(j) = rng.cgaussian();
  return g * factor_;
}

RowVec sample_regressor(const Mat& covariance, Rng& rng) {
  return RegressorSampler(covariance).sample(rng);
}

NodeState generate_node_state(const NetworkScenario& scenario, int k,
                              const RegressorSampler& sampler, Rng& rng) {
  NodeState s;
  s.regressor = sampler.sample(rng);
  s.meas_noise = std::sqrt(scenario.meas_noise_var[static_cast<std::size_t>(k)]) *
                 rng.cgaussian();
  s.measurement = (s.regressor * scenario.true_weights)(0) + s.meas_noise;
  return s;
}

NodeState generate_node_state(const NetworkScenario& scenario, int k, Rng& rng) {
  RegressorSampler sampler(
      build_regressor_covariance(scenario.regressor_corr.at(static_cast<std::size_t>(k)),
                                 scenario.dim));
  return generate_node_state(scenario, k, sampler, rng);
}

std::vector<Point> place_nodes_uniform(double width, double height, int n,
                                       Rng& rng) {
  if (width < 0.0 || height < 0.0)
    throw std::invalid_argument("placement area must be non-negative");
  std::vector<Point> pts(static_cast<std::size_t>(n));
  for (auto& p : pts) {
    p.x = rng.uniform(0.0, width);
    p.y = rng.uniform(0.0, height);
  }
  return pts;
}

}  // namespace clmslab
