#ifndef CLMSLAB_EXPERIMENTS_HPP
#define CLMSLAB_EXPERIMENTS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "clmslab/adaptation.hpp"
#include "clmslab/theory.hpp"

namespace clmslab {

struct AlgorithmConfig {
  Algorithm algo = Algorithm::Clms;
  double step = 0.0;
  std::string label;
};

struct ExperimentSpec {
  NetworkScenario scenario;
  std::vector<AlgorithmConfig> algorithms;
  int iterations = 0;      // T
  int trials = 1;          // ensemble size E
  std::uint64_t seed = 0;
  int window = 1;          // final iterations averaged for steady-state stats
  // When set, node positions are redrawn per trial over [0,area] x [0,area];
  // theory overlays assume the fixed placement and are then only indicative.
  bool placement_per_trial = false;
  double area = 1.0;

  void validate() const;
};

struct AlgorithmResult {
  std::string label;
  std::vector<double> msd;         // E||w_o - w_i||^2, length T
  std::vector<Vec> mean_error;     // ensemble mean of w_o - w_i, length T
  Vec empirical_bias;              // window average of the mean error
  // Per-component standard error of empirical_bias (complex: re/im variances
  // combined), from the ensemble spread of per-trial window means.
  Eigen::VectorXd bias_se;
  double steady_msd = 0.0;         // window average of the MSD trajectory
  double steady_msd_db = 0.0;
  int diverged_trials = 0;
};

struct ExperimentResult {
  std::vector<AlgorithmResult> algorithms;
  std::vector<double> success_rate;  // empirical p-hat per node
  long link_draws_per_node = 0;
  std::uint64_t seed = 0;
};

struct TrialResult {
  // weights[a][i] is algorithm a's estimate after iteration i.
  std::vector<std::vector<Vec>> weights;
  std::vector<bool> diverged;
  std::vector<long> success_count;  // per node
};

TrialResult run_trial(const ExperimentSpec& spec, int trial_index);

/// Runs the ensemble and reduces in trial order, so the result depends only
/// on (spec, seed). Throws std::runtime_error if every trial of some
/// algorithm diverged.
ExperimentResult run_ensemble(const ExperimentSpec& spec);

struct ComparisonRow {
  std::string quantity;
  double empirical = 0.0;
  double predicted = 0.0;
  double abs_delta = 0.0;
  double rel_delta = 0.0;
};

/// Aligns empirical success rates, bias components and steady-state MSD
/// against the closed-form report. MSD rows carry dB values.
std::vector<ComparisonRow> compare_with_theory(const ExperimentResult& result,
                                               const TheoryReport& theory,
                                               const NetworkScenario& scenario);

}  // namespace clmslab

#endif
