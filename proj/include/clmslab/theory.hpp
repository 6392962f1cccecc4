#ifndef CLMSLAB_THEORY_HPP
#define CLMSLAB_THEORY_HPP

#include <utility>
#include <vector>

#include "clmslab/model.hpp"

namespace clmslab {

/// Closed-form predictions for a scenario at one BC step size.
struct TheoryReport {
  std::vector<double> success_probs;   // p_k
  std::vector<double> eq_power;        // E[I_k |g_k|^2] (analog) or p_k (digital)
  std::vector<Mat> eff_link_cov;       // R_{v,k}
  std::vector<double> hat_noise_var;   // sigma^2_{v-hat,k}
  Vec biased_opt;                      // limiting mean estimate of CLMS
  Vec unbiased_opt;                    // equals the true weights
  Vec bias;                            // b = w_o - biased_opt
  double clms_mu_max = 0.0;
  double bc_mu_max = 0.0;
  double bc_step = 0.0;
  double steady_msd = 0.0;             // BC-CLMS steady-state MSD at bc_step
};

/// E[I |g|^2] = (r^alpha / P) * lambda * Integral_{x0}^inf e^(-lambda x)/x dx
/// with x0 = (r/r_o)^alpha and lambda = 1/sigma_h^2, by adaptive quadrature
/// to ~1e-10 relative tolerance.
double expected_eq_power(double fading_var, double r, double r_nominal,
                         double alpha, double tx_power);

/// R_{v,k}: the expected equalizer power (analog) or p_k (digital) times the
/// raw link-noise covariance sigma_z^2 I.
Mat effective_link_cov(const NetworkScenario& scenario, int k);

/// (w_ctrl, w_o): the stationary point of the gated cost on noisy data, and
/// the unbiased optimum (identically the true weights).
std::pair<Vec, Vec> optimal_solutions(const NetworkScenario& scenario);

/// b = (sum_k (p_k R_u,k + R_v,k))^-1 (sum_k R_v,k) w_o; equals
/// w_o - w_ctrl algebraically and does not involve the step size.
Vec clms_bias(const NetworkScenario& scenario);

/// (mu_max for CLMS, mu_max for BC-CLMS): 2 / lambda_max of the respective
/// mean-recursion curvature matrices.
std::pair<double, double> stability_bounds(const NetworkScenario& scenario);

/// Mean-recursion matrices: D(mu) = I - mu sum_k (p_k R_u,k + R_v,k) for
/// CLMS, D-bar(mu) = I - mu sum_k p_k R_u,k for BC-CLMS. Used by the
/// stability-boundary bisection and the mean-recursion checker.
Mat clms_mean_matrix(const NetworkScenario& scenario, double mu);
Mat bc_mean_matrix(const NetworkScenario& scenario, double mu);

/// Forcing term of the CLMS mean recursion: E[w-err_i] = D E[w-err_{i-1}]
/// + mu * f with f = (sum_k R_v,k) w_o.
Vec clms_mean_forcing(const NetworkScenario& scenario);

double spectral_radius(const Mat& a);

/// Steady-state MSD of BC-CLMS via the vectorized variance recursion,
/// with the small-step closure F = D-bar^T (x) D-bar^*. The fourth-moment
/// factor beta defaults to the circular complex Gaussian value 2. Throws if
/// the closure is not contractive at this step size.
double bc_steady_state_msd(const NetworkScenario& scenario, double mu_bar,
                           double beta = 2.0);

TheoryReport make_theory_report(const NetworkScenario& scenario, double bc_step);

/// Brute-force fit of the fourth-moment factor in
/// E[v^* v w w^* v^* v] = (beta-1) R w w^* R + R Tr(w w^* R), for isotropic
/// Gaussian noise v with per-component variance `var`. circular=false runs
/// the real-Gaussian control (the fit lands near 3 there). Returns NaN when
/// w = 0 (the fitted term vanishes).
double moment_factor_oracle(double var, const Vec& w, long trials, Rng& rng,
                            bool circular = true);

Mat kronecker(const Mat& a, const Mat& b);

}  // namespace clmslab

#endif
