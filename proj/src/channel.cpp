#include "clmslab/channel.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace clmslab {

double threshold_snr(const NetworkScenario& scenario, int k) {
  const auto ku = static_cast<std::size_t>(k);
  const double sz2 = scenario.link_noise_var[ku];
  const double denom = sz2 * std::pow(scenario.nominal_range[ku], scenario.path_loss_exp);
  if (denom <= 0.0) return std::numeric_limits<double>::infinity();
  return scenario.tx_power / denom;
}

double success_probability(double fading_var, double r, double r_nominal,
                           double alpha) {
  if (!(fading_var > 0.0) || !(r > 0.0) || !(r_nominal > 0.0) || !(alpha > 0.0))
    throw std::invalid_argument("success_probability requires positive arguments");
  return std::exp(-std::pow(r / r_nominal, alpha) / fading_var);
}

namespace {

LinkDraw finish_draw(const NetworkScenario& scenario, int k, Cplx h, Rng& rng) {
  const auto ku = static_cast<std::size_t>(k);
  const int m = scenario.dim;
  const double r = scenario.distance(k);
  const double alpha = scenario.path_loss_exp;
  const double r_pow = std::pow(r, alpha);
  const double sz2 = scenario.link_noise_var[ku];

  LinkDraw d;
  d.fading = h;
  d.link_noise.resize(m + 1);
  const double noise_scale = std::sqrt(sz2);
  for (int j = 0; j <= m; ++j) d.link_noise(j) = noise_scale * rng.cgaussian();

  const double h2 = std::norm(h);
  d.snr = sz2 > 0.0 ? h2 * scenario.tx_power / (sz2 * r_pow)
                    : std::numeric_limits<double>::infinity();
  // Equivalent to snr >= threshold_snr; stated directly in terms of |h|^2 so
  // the gate stays well defined when the link noise variance is zero.
  d.success = h2 >= std::pow(r / scenario.nominal_range[ku], alpha);

  if (d.success) {
    Cplx h_est = h;
    if (scenario.chan_est_err_var > 0.0)
      h_est += std::sqrt(scenario.chan_est_err_var) * rng.cgaussian();
    d.eq_gain = std::conj(h_est) / std::norm(h_est) *
                std::sqrt(r_pow / scenario.tx_power);
  }
  return d;
}

}  // namespace

LinkDraw draw_link(const NetworkScenario& scenario, int k, Rng& rng) {
  const Cplx h =
      std::sqrt(scenario.fading_var[static_cast<std::size_t>(k)]) * rng.cgaussian();
  return finish_draw(scenario, k, h, rng);
}

LinkDraw realize_link(const NetworkScenario& scenario, int k, Cplx fading,
                      Rng& rng) {
  return finish_draw(scenario, k, fading, rng);
}

LinkProcess::LinkProcess(const NetworkScenario& scenario)
    : scenario_(&scenario),
      prev_fading_(static_cast<std::size_t>(scenario.num_nodes)),
      started_(static_cast<std::size_t>(scenario.num_nodes), false) {}

LinkDraw LinkProcess::draw(int k, Rng& rng) {
  const auto ku = static_cast<std::size_t>(k);
  const double rho = scenario_->fading_corr;
  const double sd = std::sqrt(scenario_->fading_var[ku]);
  Cplx h;
  if (rho == 0.0 || !started_[ku]) {
    h = sd * rng.cgaussian();
  } else {
    h = rho * prev_fading_[ku] + std::sqrt(1.0 - rho * rho) * sd * rng.cgaussian();
  }
  prev_fading_[ku] = h;
  started_[ku] = true;
  return finish_draw(*scenario_, k, h, rng);
}

ReceivedFrame transmit(const NetworkScenario& scenario, int k,
                       const NodeState& node_state, const LinkDraw& link) {
  const int m = scenario.dim;
  if (node_state.regressor.size() != m)
    throw std::invalid_argument("node state dimension mismatch");
  if (link.link_noise.size() != m + 1)
    throw std::invalid_argument("link noise dimension mismatch");

  ReceivedFrame f;
  f.success = link.success;
  const RowVec noise_u = link.link_noise.head(m);
  const Cplx noise_d = link.link_noise(m);

  if (scenario.mode == LinkMode::Digital) {
    // a_k(i) = I_k(i): a lost packet delivers nothing.
    if (!link.success) return f;
    f.regressor = node_state.regressor + noise_u;
    f.datum = node_state.measurement + noise_d;
    f.eq_gain = 1.0;
    f.has_raw = true;
    f.raw_regressor = f.regressor;
    f.raw_datum = f.datum;
    return f;
  }

  const double r_pow = std::pow(scenario.distance(k), scenario.path_loss_exp);
  const Cplx a = link.fading * std::sqrt(scenario.tx_power / r_pow);
  f.has_raw = true;
  f.raw_regressor = a * node_state.regressor + noise_u;
  f.raw_datum = a * node_state.measurement + noise_d;
  if (!link.success) return f;

  f.eq_gain = link.eq_gain;
  if (scenario.chan_est_err_var == 0.0) {
    // With perfect channel knowledge g a = 1, so the equalized data reduce to
    // u + g v^(u) and d + g v^(d); forming them that way keeps the identity
    // exact in floating point.
    f.regressor = node_state.regressor + f.eq_gain * noise_u;
    f.datum = node_state.measurement + f.eq_gain * noise_d;
  } else {
    f.regressor = f.eq_gain * f.raw_regressor;
    f.datum = f.eq_gain * f.raw_datum;
  }
  return f;
}

}  // namespace clmslab
