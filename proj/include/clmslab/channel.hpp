#ifndef CLMSLAB_CHANNEL_HPP
#define CLMSLAB_CHANNEL_HPP

#include <vector>

#include "clmslab/model.hpp"

namespace clmslab {

/// One realization of the node-to-fusion-center link.
struct LinkDraw {
  Cplx fading;        // h
  RowVec link_noise;  // v^(z), 1 x (M+1): [v^(u), v^(d)]
  double snr = 0.0;   // instantaneous SNR
  bool success = false;
  Cplx eq_gain;       // g; meaningful only on successful analog links
};

/// What the fusion center holds for one node at one iteration. The equalized
/// payload (regressor/datum/eq_gain) is only valid on successful frames; the
/// raw payload is what arrived before equalization and is what the baseline
/// algorithm consumes. Digital-mode failures deliver nothing at all.
struct ReceivedFrame {
  bool success = false;
  RowVec regressor;   // u-bar (analog) or u-hat (digital)
  Cplx datum;         // d-bar or d-hat
  Cplx eq_gain;       // g on analog links, 1 on digital links
  bool has_raw = false;
  RowVec raw_regressor;  // u-hat before equalization
  Cplx raw_datum;
};

/// Threshold SNR: P / (sigma_z^2 (r_o)^alpha).
double threshold_snr(const NetworkScenario& scenario, int k);

/// Success probability exp(-(r/r_o)^alpha / sigma_h^2).
double success_probability(double fading_var, double r, double r_nominal,
                           double alpha);

/// Draws fading, link noise, SNR, the success indicator and (on success) the
/// LS equalizer gain. I.i.d. fading; for the AR(1) process use LinkProcess.
LinkDraw draw_link(const NetworkScenario& scenario, int k, Rng& rng);

/// Like draw_link but with the fading coefficient supplied by the caller.
LinkDraw realize_link(const NetworkScenario& scenario, int k, Cplx fading,
                      Rng& rng);

/// Per-trial channel state. Handles the optional first-order temporal fading
/// correlation and the optional channel-estimation error applied inside the
/// equalizer gain.
class LinkProcess {
 public:
  explicit LinkProcess(const NetworkScenario& scenario);
  LinkDraw draw(int k, Rng& rng);

 private:
  const NetworkScenario* scenario_;
  std::vector<Cplx> prev_fading_;
  std::vector<bool> started_;
};

/// Applies the channel to z = [u, d] and (analog mode) equalizes. Failed
/// frames keep the raw payload but no equalized one.
ReceivedFrame transmit(const NetworkScenario& scenario, int k,
                       const NodeState& node_state, const LinkDraw& link);

}  // namespace clmslab

#endif
