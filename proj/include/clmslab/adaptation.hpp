#ifndef CLMSLAB_ADAPTATION_HPP
#define CLMSLAB_ADAPTATION_HPP

#include <vector>

#include "clmslab/channel.hpp"
#include "clmslab/model.hpp"

namespace clmslab {

enum class Algorithm { Clms, BcClms, Baseline };

/// Fusion-center estimator state. One instance per algorithm per trial.
struct AdaptiveFilter {
  Vec weights;        // w, length M; starts at zero unless set otherwise
  double step = 0.0;  // mu (or mu-bar)
  Algorithm mode = Algorithm::Clms;
  std::vector<Mat> reg_noise_cov;  // R^(u)_v per node, BC-CLMS only
  double divergence_guard = 1e6;
  bool diverged = false;

  static AdaptiveFilter make(Algorithm mode, int dim, double step);
};

/// w <- w + mu * sum_k I_k u-bar^* (d-bar - u-bar w). Failed frames
/// contribute nothing.
void clms_step(AdaptiveFilter& filter, const std::vector<ReceivedFrame>& frames);

/// CLMS update plus the bias-canceling term |g_k|^2 R^(u)_{v,k} w inside the
/// per-node sum. |g|^2 is the power scaling the equalized regressor noise
/// actually carries; on digital links g = 1 and the term reduces to
/// R^(u)_{v,k} w.
void bc_clms_step(AdaptiveFilter& filter, const std::vector<ReceivedFrame>& frames);

/// Conventional CLMS on the raw received data: no equalization, no failure
/// gating. Frames without a raw payload (digital packet loss) are skipped.
void baseline_clms_step(AdaptiveFilter& filter,
                        const std::vector<ReceivedFrame>& frames);

/// Dispatches on filter.mode and applies the divergence guard.
void filter_step(AdaptiveFilter& filter, const std::vector<ReceivedFrame>& frames);

}  // namespace clmslab

#endif
