#include "clmslab/experiments.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "clmslab/channel.hpp"

namespace clmslab {

void ExperimentSpec::validate() const {
  scenario.validate();
  if (algorithms.empty())
    throw std::invalid_argument("at least one algorithm is required");
  if (iterations < 0) throw std::invalid_argument("iterations must be >= 0");
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");
  if (window < 1 || (iterations > 0 && window > iterations))
    throw std::invalid_argument("window must satisfy 1 <= window <= iterations");
  for (const auto& a : algorithms)
    if (!(a.step > 0.0)) throw std::invalid_argument("step size must be > 0");
}

namespace {

struct Accumulators {
  // Indexed [algorithm][iteration].
  std::vector<std::vector<double>> msd_sum;
  std::vector<std::vector<Vec>> err_sum;
  // Per-trial window-mean error: running sum and per-component |.|^2 sum.
  std::vector<Vec> winmean_sum;
  std::vector<Eigen::VectorXd> winmean_sq_sum;
  std::vector<int> diverged;
  std::vector<long> success_count;
};

std::vector<AdaptiveFilter> make_filters(const ExperimentSpec& spec) {
  std::vector<AdaptiveFilter> filters;
  for (const auto& cfg : spec.algorithms) {
    AdaptiveFilter f = AdaptiveFilter::make(cfg.algo, spec.scenario.dim, cfg.step);
    if (cfg.algo == Algorithm::BcClms) {
      for (int k = 0; k < spec.scenario.num_nodes; ++k)
        f.reg_noise_cov.push_back(
            spec.scenario.link_noise_var[static_cast<std::size_t>(k)] *
            Mat::Identity(spec.scenario.dim, spec.scenario.dim));
    }
    filters.push_back(std::move(f));
  }
  return filters;
}

/// One trial, streaming per-iteration stats into `acc` (or trajectories into
/// `out` when non-null). RNG substream keyed by trial index.
void execute_trial(const ExperimentSpec& spec,
                   const std::vector<RegressorSampler>& samplers,
                   int trial_index, Accumulators* acc, TrialResult* out) {
  Rng rng = Rng::substream(spec.seed, static_cast<std::uint64_t>(trial_index));

  NetworkScenario scenario = spec.scenario;
  if (spec.placement_per_trial) {
    do {
      scenario.node_positions =
          place_nodes_uniform(spec.area, spec.area, scenario.num_nodes, rng);
    } while ([&] {
      for (int k = 0; k < scenario.num_nodes; ++k)
        if (!(scenario.distance(k) > 0.0)) return true;
      return false;
    }());
  }

  std::vector<AdaptiveFilter> filters = make_filters(spec);
  LinkProcess links(scenario);
  const int n = scenario.num_nodes;
  std::vector<ReceivedFrame> frames(static_cast<std::size_t>(n));
  std::vector<Vec> window_sum(filters.size(), Vec::Zero(scenario.dim));
  const int window_start = spec.iterations - spec.window;

  for (int i = 0; i < spec.iterations; ++i) {
    for (int k = 0; k < n; ++k) {
      const NodeState state = generate_node_state(scenario, k,
                                                  samplers[static_cast<std::size_t>(k)], rng);
      const LinkDraw link = links.draw(k, rng);
      frames[static_cast<std::size_t>(k)] = transmit(scenario, k, state, link);
      if (acc && link.success) ++acc->success_count[static_cast<std::size_t>(k)];
      if (out && link.success) ++out->success_count[static_cast<std::size_t>(k)];
    }
    for (std::size_t a = 0; a < filters.size(); ++a) {
      filter_step(filters[a], frames);
      if (acc) {
        const Vec err = scenario.true_weights - filters[a].weights;
        acc->msd_sum[a][static_cast<std::size_t>(i)] += err.squaredNorm();
        acc->err_sum[a][static_cast<std::size_t>(i)] += err;
        if (i >= window_start) window_sum[a] += err;
      }
      if (out) out->weights[a].push_back(filters[a].weights);
    }
  }
  for (std::size_t a = 0; a < filters.size(); ++a) {
    if (acc) {
      if (filters[a].diverged) ++acc->diverged[a];
      if (spec.iterations > 0) {
        const Vec wm = window_sum[a] / static_cast<double>(spec.window);
        acc->winmean_sum[a] += wm;
        acc->winmean_sq_sum[a] += wm.cwiseAbs2();
      }
    }
    if (out) out->diverged[a] = filters[a].diverged;
  }
}

std::vector<RegressorSampler> make_samplers(const NetworkScenario& scenario) {
  std::vector<RegressorSampler> samplers;
  samplers.reserve(static_cast<std::size_t>(scenario.num_nodes));
  for (int k = 0; k < scenario.num_nodes; ++k)
    samplers.emplace_back(build_regressor_covariance(
        scenario.regressor_corr[static_cast<std::size_t>(k)], scenario.dim));
  return samplers;
}

}  // namespace

TrialResult run_trial(const ExperimentSpec& spec, int trial_index) {
  spec.validate();
  TrialResult out;
  out.weights.resize(spec.algorithms.size());
  out.diverged.assign(spec.algorithms.size(), false);
  out.success_count.assign(static_cast<std::size_t>(spec.scenario.num_nodes), 0);
  const auto samplers = make_samplers(spec.scenario);
  execute_trial(spec, samplers, trial_index, nullptr, &out);
  return out;
}

ExperimentResult run_ensemble(const ExperimentSpec& spec) {
  spec.validate();
  const std::size_t na = spec.algorithms.size();
  const auto t = static_cast<std::size_t>(spec.iterations);

  Accumulators acc;
  acc.msd_sum.assign(na, std::vector<double>(t, 0.0));
  acc.err_sum.assign(na, std::vector<Vec>(t, Vec::Zero(spec.scenario.dim)));
  acc.winmean_sum.assign(na, Vec::Zero(spec.scenario.dim));
  acc.winmean_sq_sum.assign(na, Eigen::VectorXd::Zero(spec.scenario.dim));
  acc.diverged.assign(na, 0);
  acc.success_count.assign(static_cast<std::size_t>(spec.scenario.num_nodes), 0);

  const auto samplers = make_samplers(spec.scenario);
  for (int trial = 0; trial < spec.trials; ++trial)
    execute_trial(spec, samplers, trial, &acc, nullptr);

  ExperimentResult result;
  result.seed = spec.seed;
  result.link_draws_per_node =
      static_cast<long>(spec.trials) * spec.iterations;
  for (long c : acc.success_count)
    result.success_rate.push_back(
        result.link_draws_per_node > 0
            ? static_cast<double>(c) / static_cast<double>(result.link_draws_per_node)
            : 0.0);

  const double e = static_cast<double>(spec.trials);
  for (std::size_t a = 0; a < na; ++a) {
    AlgorithmResult ar;
    ar.label = spec.algorithms[a].label;
    ar.diverged_trials = acc.diverged[a];
    if (ar.diverged_trials == spec.trials && spec.iterations > 0)
      throw std::runtime_error("all trials diverged for algorithm '" +
                               ar.label + "'; reduce the step size");
    ar.msd.resize(t);
    ar.mean_error.resize(t);
    for (std::size_t i = 0; i < t; ++i) {
      ar.msd[i] = acc.msd_sum[a][i] / e;
      ar.mean_error[i] = acc.err_sum[a][i] / e;
    }
    ar.empirical_bias = Vec::Zero(spec.scenario.dim);
    ar.bias_se = Eigen::VectorXd::Zero(spec.scenario.dim);
    ar.steady_msd = 0.0;
    if (spec.iterations > 0) {
      const auto w = static_cast<std::size_t>(spec.window);
      for (std::size_t i = t - w; i < t; ++i) {
        ar.empirical_bias += ar.mean_error[i];
        ar.steady_msd += ar.msd[i];
      }
      ar.empirical_bias /= static_cast<double>(w);
      ar.steady_msd /= static_cast<double>(w);
      const Vec mean_wm = acc.winmean_sum[a] / e;
      const Eigen::VectorXd var =
          (acc.winmean_sq_sum[a] / e - mean_wm.cwiseAbs2()).cwiseMax(0.0);
      ar.bias_se = (var / e).cwiseSqrt();
    }
    ar.steady_msd_db = 10.0 * std::log10(ar.steady_msd);
    result.algorithms.push_back(std::move(ar));
  }
  return result;
}

std::vector<ComparisonRow> compare_with_theory(const ExperimentResult& result,
                                               const TheoryReport& theory,
                                               const NetworkScenario& scenario) {
  std::vector<ComparisonRow> rows;
  auto add = [&rows](const std::string& name, double emp, double pred) {
    ComparisonRow r;
    r.quantity = name;
    r.empirical = emp;
    r.predicted = pred;
    r.abs_delta = std::abs(emp - pred);
    r.rel_delta = pred != 0.0 ? r.abs_delta / std::abs(pred)
                              : std::numeric_limits<double>::infinity();
    rows.push_back(std::move(r));
  };

  for (std::size_t k = 0; k < theory.success_probs.size(); ++k)
    add("success_prob_node" + std::to_string(k + 1),
        k < result.success_rate.size() ? result.success_rate[k] : 0.0,
        theory.success_probs[k]);

  for (const auto& ar : result.algorithms) {
    const bool biased = ar.label.find("clms") != std::string::npos &&
                        ar.label.find("bc") == std::string::npos;
    for (int j = 0; j < scenario.dim; ++j) {
      const Cplx pred = biased ? theory.bias(j) : Cplx(0.0, 0.0);
      add(ar.label + "_bias_re" + std::to_string(j + 1),
          std::real(ar.empirical_bias(j)), std::real(pred));
      add(ar.label + "_bias_im" + std::to_string(j + 1),
          std::imag(ar.empirical_bias(j)), std::imag(pred));
    }
    if (ar.label.find("bc") != std::string::npos)
      add(ar.label + "_steady_msd_db", ar.steady_msd_db,
          10.0 * std::log10(theory.steady_msd));
  }
  return rows;
}

}  // namespace clmslab
