#ifndef CLMSLAB_CONFIG_HPP
#define CLMSLAB_CONFIG_HPP

#include <cstdint>
#include <stdexcept>
#include <string>

#include "clmslab/experiments.hpp"

namespace clmslab {

/// Parse failure with the offending line number baked into what().
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Pass/fail tolerances used by the `compare` subcommand.
struct CompareTolerances {
  double bias_rel = 0.05;     // per-component relative, CLMS bias vs theory
  double bias_abs = 0.01;     // absolute floor for near-zero components
  double msd_db = 1.5;        // BC-CLMS steady-state MSD vs prediction
  double success_se = 3.0;    // binomial standard errors for p-hat
};

/// Everything a config file describes: the scenario (with placement
/// resolved), the experiment settings and the per-algorithm step sizes.
struct ParsedConfig {
  NetworkScenario scenario;
  ExperimentSpec experiment;  // scenario field mirrors `scenario`
  double step_size = 0.0;
  double bc_step_size = 0.0;
  double baseline_step_size = 0.0;
  std::uint64_t placement_seed = 0;
  double area_size = 1.0;
  bool explicit_positions = false;
  CompareTolerances tolerances;
  std::string sweep_param;            // step_size | chan_est_err_var | fading_corr
  std::vector<double> sweep_values;
};

/// Flat `key = value` text with `#` comments and bracketed arrays. Complex
/// entries use `a+bj`. Unknown keys, missing keys and out-of-range values all
/// raise ConfigError with the line number.
ParsedConfig parse_config(const std::string& text);

/// Canonical text form; parse_config(serialize_config(c)) reproduces c.
std::string serialize_config(const ParsedConfig& config);

std::string version_string();

/// FNV-1a over the canonical serialized config; recorded in CSV headers.
std::uint64_t config_hash(const ParsedConfig& config);

std::string format_complex(Cplx z);

}  // namespace clmslab

#endif
