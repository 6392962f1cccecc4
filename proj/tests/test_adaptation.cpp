#include <doctest.h>

#include <cmath>

#include "clmslab/adaptation.hpp"
#include "clmslab/channel.hpp"
#include "scenarios.hpp"

using namespace clmslab;
using namespace clmslab::testutil;

namespace {

ReceivedFrame frame(const RowVec& u, Cplx d, bool success = true,
                    Cplx g = Cplx(1.0, 0.0)) {
  ReceivedFrame f;
  f.success = success;
  f.regressor = u;
  f.datum = d;
  f.eq_gain = g;
  f.has_raw = true;
  f.raw_regressor = u;
  f.raw_datum = d;
  return f;
}

}  // namespace

TEST_CASE("update matches the hand-computed single-node expression") {
  AdaptiveFilter filt = AdaptiveFilter::make(Algorithm::Clms, 2, 0.1);
  filt.weights << Cplx(0.5, 0.0), Cplx(0.0, -0.5);
  RowVec u(2);
  u << Cplx(1.0, 1.0), Cplx(2.0, 0.0);
  const Cplx d(1.0, -1.0);
  const Vec before = filt.weights;
  clms_step(filt, {frame(u, d)});
  const Cplx err = d - (u * before)(0);
  const Vec expected = before + 0.1 * (u.adjoint() * err);
  CHECK((filt.weights - expected).norm() < 1e-15);
}

TEST_CASE("failed frames leave the weights untouched") {
  AdaptiveFilter filt = AdaptiveFilter::make(Algorithm::Clms, 2, 0.1);
  RowVec u(2);
  u << Cplx(1.0, 0.0), Cplx(0.0, 1.0);
  ReceivedFrame f = frame(u, Cplx(3.0, 0.0), /*success=*/false);
  clms_step(filt, {f});
  CHECK(filt.weights.norm() == 0.0);
  filt.mode = Algorithm::BcClms;
  filt.reg_noise_cov = {Mat::Identity(2, 2)};
  bc_clms_step(filt, {f});
  CHECK(filt.weights.norm() == 0.0);
}

TEST_CASE("multi-node update is the sum of single-node updates") {
  Rng rng(41);
  RowVec u1(3), u2(3);
  for (int j = 0; j < 3; ++j) {
    u1(j) = rng.cgaussian();
    u2(j) = rng.cgaussian();
  }
  const Cplx d1 = rng.cgaussian(), d2 = rng.cgaussian();

  AdaptiveFilter joint = AdaptiveFilter::make(Algorithm::Clms, 3, 0.05);
  clms_step(joint, {frame(u1, d1), frame(u2, d2)});

  AdaptiveFilter a = AdaptiveFilter::make(Algorithm::Clms, 3, 0.05);
  AdaptiveFilter b = AdaptiveFilter::make(Algorithm::Clms, 3, 0.05);
  clms_step(a, {frame(u1, d1)});
  clms_step(b, {frame(u2, d2)});
  // Both partial updates start from w = 0, so the increments add.
  CHECK((joint.weights - (a.weights + b.weights)).norm() < 1e-15);
}

TEST_CASE("bias-compensated update adds exactly the correction term") {
  Rng rng(42);
  RowVec u(2);
  u << rng.cgaussian(), rng.cgaussian();
  const Cplx d = rng.cgaussian();
  const Cplx g(0.3, -0.7);
  const Mat rv = 0.25 * Mat::Identity(2, 2);

  AdaptiveFilter plain = AdaptiveFilter::make(Algorithm::Clms, 2, 0.1);
  plain.weights << Cplx(1.0, 0.0), Cplx(0.0, 1.0);
  AdaptiveFilter bc = AdaptiveFilter::make(Algorithm::BcClms, 2, 0.1);
  bc.weights = plain.weights;
  bc.reg_noise_cov = {rv};
  const Vec w0 = plain.weights;

  clms_step(plain, {frame(u, d, true, g)});
  bc_clms_step(bc, {frame(u, d, true, g)});

  const Vec correction = 0.1 * std::norm(g) * (rv * w0);
  CHECK((bc.weights - plain.weights - correction).norm() < 1e-15);
}

TEST_CASE("bias-compensated update demands one covariance per node") {
  AdaptiveFilter filt = AdaptiveFilter::make(Algorithm::BcClms, 2, 0.1);
  filt.reg_noise_cov = {Mat::Identity(2, 2)};
  RowVec u(2);
  u << Cplx(1.0, 0.0), Cplx(1.0, 0.0);
  CHECK_THROWS_AS(
      bc_clms_step(filt, {frame(u, Cplx(1.0, 0.0)), frame(u, Cplx(1.0, 0.0))}),
      std::invalid_argument);
}

TEST_CASE("dimension mismatch is rejected") {
  AdaptiveFilter filt = AdaptiveFilter::make(Algorithm::Clms, 3, 0.1);
  RowVec u(2);
  u << Cplx(1.0, 0.0), Cplx(1.0, 0.0);
  CHECK_THROWS_AS(clms_step(filt, {frame(u, Cplx(1.0, 0.0))}),
                  std::invalid_argument);
}

TEST_CASE("raw-data variant ignores the gate but skips missing payloads") {
  AdaptiveFilter filt = AdaptiveFilter::make(Algorithm::Baseline, 2, 0.1);
  RowVec u(2);
  u << Cplx(2.0, 0.0), Cplx(0.0, 1.0);
  ReceivedFrame failed = frame(u, Cplx(1.0, 0.0), /*success=*/false);
  baseline_clms_step(filt, {failed});
  CHECK(filt.weights.norm() > 0.0);  // failed analog frame still consumed

  AdaptiveFilter filt2 = AdaptiveFilter::make(Algorithm::Baseline, 2, 0.1);
  ReceivedFrame lost;  // digital loss: nothing delivered
  baseline_clms_step(filt2, {lost});
  CHECK(filt2.weights.norm() == 0.0);
}

TEST_CASE("dispatcher applies the divergence guard and freezes the filter") {
  AdaptiveFilter filt = AdaptiveFilter::make(Algorithm::Clms, 1, 1.0);
  filt.divergence_guard = 10.0;
  RowVec u(1);
  u << Cplx(5.0, 0.0);
  filter_step(filt, {frame(u, Cplx(100.0, 0.0))});
  CHECK(filt.diverged);
  const Vec frozen = filt.weights;
  filter_step(filt, {frame(u, Cplx(100.0, 0.0))});
  CHECK((filt.weights - frozen).norm() == 0.0);
}

TEST_CASE("noiseless sure link drives the error to zero geometrically") {
  NetworkScenario s = sure_link_scenario(3);
  s.mode = LinkMode::Analog;
  Rng rng(43);
  RegressorSampler sampler(build_regressor_covariance(s.regressor_corr[0], s.dim));
  AdaptiveFilter filt = AdaptiveFilter::make(Algorithm::Clms, 3, 0.2);
  for (int i = 0; i < 400; ++i) {
    const NodeState st = generate_node_state(s, 0, sampler, rng);
    const LinkDraw d = draw_link(s, 0, rng);
    filter_step(filt, {transmit(s, 0, st, d)});
  }
  CHECK_FALSE(filt.diverged);
  CHECK((filt.weights - s.true_weights).norm() < 1e-6);
}

TEST_CASE("on clean data the two algorithms coincide") {
  NetworkScenario s = sure_link_scenario(2);
  Rng rng1(44), rng2(44);
  RegressorSampler sampler(build_regressor_covariance(s.regressor_corr[0], s.dim));
  AdaptiveFilter plain = AdaptiveFilter::make(Algorithm::Clms, 2, 0.1);
  AdaptiveFilter bc = AdaptiveFilter::make(Algorithm::BcClms, 2, 0.1);
  bc.reg_noise_cov = {Mat::Zero(2, 2)};  // zero link noise: nothing to cancel
  for (int i = 0; i < 100; ++i) {
    const NodeState st1 = generate_node_state(s, 0, sampler, rng1);
    const LinkDraw d1 = draw_link(s, 0, rng1);
    filter_step(plain, {transmit(s, 0, st1, d1)});
    const NodeState st2 = generate_node_state(s, 0, sampler, rng2);
    const LinkDraw d2 = draw_link(s, 0, rng2);
    filter_step(bc, {transmit(s, 0, st2, d2)});
  }
  CHECK((plain.weights - bc.weights).norm() == 0.0);
}
