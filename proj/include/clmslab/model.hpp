#ifndef CLMSLAB_MODEL_HPP
#define CLMSLAB_MODEL_HPP

#include <Eigen/Dense>
#include <complex>
#include <string>
#include <vector>

#include "clmslab/rng.hpp"

namespace clmslab {

using Cplx = std::complex<double>;
using Vec = Eigen::VectorXcd;
using RowVec = Eigen::RowVectorXcd;
using Mat = Eigen::MatrixXcd;

struct Point {
  double x = 0.0;
  double y = 0.0;
};

enum class LinkMode { Analog, Digital };

/// Static description of the network: geometry, powers, noise levels and
/// channel statistics. Units: powers in mW, distances in km, the path loss
/// exponent dimensionless; SNR quantities are the dimensionless ratio
/// P / (sigma_z^2 r^alpha) under this convention.
struct NetworkScenario {
  int num_nodes = 0;
  int dim = 0;
  Vec true_weights;                    // w_o, length dim
  std::vector<Point> node_positions;   // km
  Point fusion_position;               // km
  double tx_power = 0.0;               // P, mW
  double path_loss_exp = 0.0;          // alpha
  std::vector<double> nominal_range;   // r_o per node, km
  std::vector<double> meas_noise_var;  // sigma^2_v per node
  std::vector<double> link_noise_var;  // sigma^{(z)2}_v per node
  std::vector<double> fading_var;      // sigma^2_h per node
  std::vector<double> regressor_corr;  // eta per node, in [0,1)
  LinkMode mode = LinkMode::Analog;

  // Optional channel knobs, both zero by default (i.i.d. fading, perfect
  // channel knowledge at the fusion center).
  double chan_est_err_var = 0.0;  // variance of the error added to h inside g
  double fading_corr = 0.0;       // AR(1) coefficient of the h process

  /// Distance from node k to the fusion center, km.
  double distance(int k) const;

  /// Throws std::invalid_argument on any violated field constraint.
  /// Noise variances may be zero (degenerate analyses need that);
  /// fading variance and geometry must be strictly positive.
  void validate() const;
};

/// One node's source data at one iteration: d = u w_o + v by construction.
struct NodeState {
  RowVec regressor;   // u, 1 x M
  Cplx measurement;   // d
  Cplx meas_noise;    // v
};

/// Correlation matrix with entries eta^(m-n) for m >= n, mirrored
/// conjugately below the diagonal. With real eta this is a symmetric
/// Toeplitz matrix; positive definite for eta in [0,1).
Mat build_regressor_covariance(double eta, int dim);

/// Holds the factor B with B^* B = R_u so correlated rows can be drawn as
/// u = g B with g i.i.d. standard circular complex Gaussian.
class RegressorSampler {
 public:
  explicit RegressorSampler(const Mat& covariance);
  RowVec sample(Rng& rng) const;
  int dim() const { return static_cast<int>(factor_.rows()); }

 private:
  Mat factor_;  // upper-triangular, B^* B = R_u
};

/// One-off draw from N(0, R_u); tests and small callers.
RowVec sample_regressor(const Mat& covariance, Rng& rng);

NodeState generate_node_state(const NetworkScenario& scenario, int k, Rng& rng);

/// NodeState from an externally drawn regressor (the sampler is the hot-loop
/// path; the covariance factorization is done once per node).
NodeState generate_node_state(const NetworkScenario& scenario, int k,
                              const RegressorSampler& sampler, Rng& rng);

/// I.i.d. uniform placement over [0,w] x [0,h].
std::vector<Point> place_nodes_uniform(double width, double height, int n,
                                       Rng& rng);

}  // namespace clmslab

#endif
