#include "clmslab/adaptation.hpp"

#include <stdexcept>

namespace clmslab {

AdaptiveFilter AdaptiveFilter::make(Algorithm mode, int dim, double step) {
  AdaptiveFilter f;
  f.weights = Vec::Zero(dim);
  f.step = step;
  f.mode = mode;
  return f;
}

namespace {

void check_frame_dim(const AdaptiveFilter& filter, const RowVec& u) {
  if (u.size() != filter.weights.size())
    throw std::invalid_argument("frame dimension does not match filter weights");
}

}  // namespace

void clms_step(AdaptiveFilter& filter, const std::vector<ReceivedFrame>& frames) {
  Vec update = Vec::Zero(filter.weights.size());
  for (const ReceivedFrame& f : frames) {
    if (!f.success) continue;
    check_frame_dim(filter, f.regressor);
    const Cplx err = f.datum - (f.regressor * filter.weights)(0);
    update += f.regressor.adjoint() * err;
  }
  filter.weights += filter.step * update;
}

void bc_clms_step(AdaptiveFilter& filter, const std::vector<ReceivedFrame>& frames) {
  if (filter.reg_noise_cov.size() != frames.size())
    throw std::invalid_argument(
        "bc_clms_step needs one regression-noise covariance per node");
  Vec update = Vec::Zero(filter.weights.size());
  for (std::size_t k = 0; k < frames.size(); ++k) {
    const ReceivedFrame& f = frames[k];
    if (!f.success) continue;
    check_frame_dim(filter, f.regressor);
    const Cplx err = f.datum - (f.regressor * filter.weights)(0);
    update += f.regressor.adjoint() * err;
    update += std::norm(f.eq_gain) * (filter.reg_noise_cov[k] * filter.weights);
  }
  filter.weights += filter.step * update;
}

void baseline_clms_step(AdaptiveFilter& filter,
                        const std::vector<ReceivedFrame>& frames) {
  Vec update = Vec::Zero(filter.weights.size());
  for (const ReceivedFrame& f : frames) {
    if (!f.has_raw) continue;
    check_frame_dim(filter, f.raw_regressor);
    const Cplx err = f.raw_datum - (f.raw_regressor * filter.weights)(0);
    update += f.raw_regressor.adjoint() * err;
  }
  filter.weights += filter.step * update;
}

void filter_step(AdaptiveFilter& filter, const std::vector<ReceivedFrame>& frames) {
  if (filter.diverged) return;
  switch (filter.mode) {
    case Algorithm::Clms:
      clms_step(filter, frames);
      break;
    case Algorithm::BcClms:
      bc_clms_step(filter, frames);
      break;
    case Algorithm::Baseline:
      baseline_clms_step(filter, frames);
      break;
  }
  if (!filter.weights.allFinite() ||
      filter.weights.norm() > filter.divergence_guard) {
    filter.diverged = true;
  }
}

}  // namespace clmslab
