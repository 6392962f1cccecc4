#include "clmslab/theory.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

#include "clmslab/channel.hpp"

namespace clmslab {

namespace {

double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double fa, double fm, double fb, double whole,
                        double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
    return left + right + delta / 15.0;
  return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

double integrate(const std::function<double(double)>& f, double a, double b,
                 double rel_tol) {
  const double fa = f(a);
  const double fb = f(b);
  const double m = 0.5 * (a + b);
  const double fm = f(m);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  const double tol = rel_tol * std::max(std::abs(whole), 1e-300);
  return adaptive_simpson(f, a, b, fa, fm, fb, whole, tol, 48);
}

/// Scale factor on the raw link-noise covariance: E[I|g|^2] under analog
/// equalization, p_k on digital links.
double noise_scale(const NetworkScenario& scenario, int k) {
  const auto ku = static_cast<std::size_t>(k);
  const double r = scenario.distance(k);
  if (scenario.mode == LinkMode::Digital)
    return success_probability(scenario.fading_var[ku], r,
                               scenario.nominal_range[ku],
                               scenario.path_loss_exp);
  return expected_eq_power(scenario.fading_var[ku], r, scenario.nominal_range[ku],
                           scenario.path_loss_exp, scenario.tx_power);
}

Mat regressor_cov(const NetworkScenario& scenario, int k) {
  return build_regressor_covariance(
      scenario.regressor_corr[static_cast<std::size_t>(k)], scenario.dim);
}

/// sum_k p_k R_u,k.
Mat gated_regressor_sum(const NetworkScenario& scenario) {
  Mat b = Mat::Zero(scenario.dim, scenario.dim);
  for (int k = 0; k < scenario.num_nodes; ++k) {
    const auto ku = static_cast<std::size_t>(k);
    const double p =
        success_probability(scenario.fading_var[ku], scenario.distance(k),
                            scenario.nominal_range[ku], scenario.path_loss_exp);
    b += p * regressor_cov(scenario, k);
  }
  return b;
}

/// sum_k R_v,k.
Mat link_cov_sum(const NetworkScenario& scenario) {
  Mat s = Mat::Zero(scenario.dim, scenario.dim);
  for (int k = 0; k < scenario.num_nodes; ++k) s += effective_link_cov(scenario, k);
  return s;
}

double lambda_max(const Mat& hermitian) {
  Eigen::SelfAdjointEigenSolver<Mat> es(hermitian);
  return es.eigenvalues().maxCoeff();
}

}  // namespace

double expected_eq_power(double fading_var, double r, double r_nominal,
                         double alpha, double tx_power) {
  if (!(fading_var > 0.0) || !(r > 0.0) || !(r_nominal > 0.0) || !(alpha > 0.0) ||
      !(tx_power > 0.0))
    throw std::invalid_argument("expected_eq_power requires positive arguments");
  const double lambda = 1.0 / fading_var;
  const double x0 = std::pow(r / r_nominal, alpha);
  // Integrand lambda e^(-lambda x)/x decays exponentially; past x0 + 60/lambda
  // the remaining mass is below 1e-25 of the scale.
  const double x_cut = x0 + 60.0 / lambda;
  const double integral = integrate(
      [lambda](double x) { return std::exp(-lambda * x) / x; }, x0, x_cut, 1e-11);
  return std::pow(r, alpha) / tx_power * lambda * integral;
}

Mat effective_link_cov(const NetworkScenario& scenario, int k) {
  const double sz2 = scenario.link_noise_var[static_cast<std::size_t>(k)];
  if (sz2 == 0.0) return Mat::Zero(scenario.dim, scenario.dim);
  return noise_scale(scenario, k) * sz2 *
         Mat::Identity(scenario.dim, scenario.dim);
}

Mat clms_mean_matrix(const NetworkScenario& scenario, double mu) {
  const int m = scenario.dim;
  return Mat::Identity(m, m) -
         mu * (gated_regressor_sum(scenario) + link_cov_sum(scenario));
}

Mat bc_mean_matrix(const NetworkScenario& scenario, double mu) {
  const int m = scenario.dim;
  return Mat::Identity(m, m) - mu * gated_regressor_sum(scenario);
}

Vec clms_mean_forcing(const NetworkScenario& scenario) {
  return link_cov_sum(scenario) * scenario.true_weights;
}

std::pair<Vec, Vec> optimal_solutions(const NetworkScenario& scenario) {
  const Mat gated = gated_regressor_sum(scenario);
  const Mat full = gated + link_cov_sum(scenario);
  const Vec rhs = gated * scenario.true_weights;
  Eigen::FullPivLU<Mat> lu_full(full);
  Eigen::FullPivLU<Mat> lu_gated(gated);
  if (!lu_full.isInvertible() || !lu_gated.isInvertible())
    throw std::runtime_error("normal equations are singular; inputs defective");
  return {lu_full.solve(rhs), lu_gated.solve(rhs)};
}

Vec clms_bias(const NetworkScenario& scenario) {
  const Mat full = gated_regressor_sum(scenario) + link_cov_sum(scenario);
  return Eigen::FullPivLU<Mat>(full).solve(clms_mean_forcing(scenario));
}

std::pair<double, double> stability_bounds(const NetworkScenario& scenario) {
  const Mat gated = gated_regressor_sum(scenario);
  const Mat full = gated + link_cov_sum(scenario);
  return {2.0 / lambda_max(full), 2.0 / lambda_max(gated)};
}

double spectral_radius(const Mat& a) {
  return a.eigenvalues().cwiseAbs().maxCoeff();
}

Mat kronecker(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

double bc_steady_state_msd(const NetworkScenario& scenario, double mu_bar,
                           double beta) {
  const int m = scenario.dim;
  const Vec& w = scenario.true_weights;
  Mat x_bar = Mat::Zero(m, m);
  for (int k = 0; k < scenario.num_nodes; ++k) {
    const auto ku = static_cast<std::size_t>(k);
    const double p =
        success_probability(scenario.fading_var[ku], scenario.distance(k),
                            scenario.nominal_range[ku], scenario.path_loss_exp);
    // Per-success regression-noise covariance: the raw sigma_z^2 I scaled by
    // E[|g|^2 | success] under analog equalization, unscaled on digital links.
    const double eff_var = noise_scale(scenario, k) / p *
                           scenario.link_noise_var[ku];
    const Mat r_eff = eff_var * Mat::Identity(m, m);
    const double hat_var = scenario.meas_noise_var[ku] + eff_var +
                           std::real((w.adjoint() * r_eff * w)(0));
    const Mat wwa = w * w.adjoint();
    x_bar += p * (hat_var * regressor_cov(scenario, k) +
                  (beta - 1.0) * (r_eff * wwa * r_eff) +
                  r_eff * (wwa * r_eff).trace());
  }

  const Mat d_bar = bc_mean_matrix(scenario, mu_bar);
  const Mat f_bar = kronecker(d_bar.transpose(), d_bar.conjugate());
  if (spectral_radius(f_bar) >= 1.0)
    throw std::runtime_error(
        "variance recursion is not contractive at mu = " + std::to_string(mu_bar));

  const Eigen::Index mm = static_cast<Eigen::Index>(m) * m;
  Mat lhs = Mat::Identity(mm, mm) - f_bar;
  Vec vec_identity(mm);
  Mat eye = Mat::Identity(m, m);
  for (Eigen::Index j = 0; j < m; ++j)
    vec_identity.segment(j * m, m) = eye.col(j);
  const Vec solved = Eigen::FullPivLU<Mat>(lhs).solve(vec_identity);

  const Mat scaled = mu_bar * mu_bar * x_bar;
  Vec vec_x(mm);
  for (Eigen::Index j = 0; j < m; ++j) vec_x.segment(j * m, m) = scaled.col(j);
  return std::real((vec_x.adjoint() * solved)(0));
}

TheoryReport make_theory_report(const NetworkScenario& scenario, double bc_step) {
  TheoryReport rep;
  for (int k = 0; k < scenario.num_nodes; ++k) {
    const auto ku = static_cast<std::size_t>(k);
    const double p =
        success_probability(scenario.fading_var[ku], scenario.distance(k),
                            scenario.nominal_range[ku], scenario.path_loss_exp);
    rep.success_probs.push_back(p);
    const double s = noise_scale(scenario, k);
    rep.eq_power.push_back(s);
    rep.eff_link_cov.push_back(effective_link_cov(scenario, k));
    const double eff_var = s / p * scenario.link_noise_var[ku];
    rep.hat_noise_var.push_back(
        scenario.meas_noise_var[ku] +
        eff_var * (1.0 + scenario.true_weights.squaredNorm()));
  }
  auto [ctrl, unbiased] = optimal_solutions(scenario);
  rep.biased_opt = ctrl;
  rep.unbiased_opt = unbiased;
  rep.bias = clms_bias(scenario);
  auto [mu_clms, mu_bc] = stability_bounds(scenario);
  rep.clms_mu_max = mu_clms;
  rep.bc_mu_max = mu_bc;
  rep.bc_step = bc_step;
  rep.steady_msd = bc_steady_state_msd(scenario, bc_step);
  return rep;
}

double moment_factor_oracle(double var, const Vec& w, long trials, Rng& rng,
                            bool circular) {
  const int m = static_cast<int>(w.size());
  if (w.norm() == 0.0) return std::numeric_limits<double>::quiet_NaN();
  const double sd = std::sqrt(var);
  Mat sum = Mat::Zero(m, m);
  Vec v(m);
  for (long t = 0; t < trials; ++t) {
    for (int j = 0; j < m; ++j)
      v(j) = circular ? sd * rng.cgaussian() : Cplx(sd * rng.gaussian(), 0.0);
    const double m2 = std::norm((v.transpose() * w)(0));
    sum.noalias() += m2 * (v.conjugate() * v.transpose());
  }
  const Mat s = sum / static_cast<double>(trials);
  const Mat g = var * var * (w * w.adjoint());                    // R w w^* R
  const Mat t0 = var * var * w.squaredNorm() * Mat::Identity(m, m);  // R Tr(..)
  const double num = std::real((g.adjoint() * (s - t0)).trace());
  const double den = std::real((g.adjoint() * g).trace());
  return num / den + 1.0;
}

}  // namespace clmslab
