// Command-line front end: closed-form reports, seeded Monte Carlo ensembles,
// theory-vs-simulation comparisons and parameter sweeps, all emitted as CSV.

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "clmslab/config.hpp"

namespace fs = std::filesystem;
using namespace clmslab;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitTolerance = 1;
constexpr int kExitInvalidInput = 2;
constexpr int kExitNumerical = 3;

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::ofstream open_csv(const fs::path& dir, const std::string& name,
                       const ParsedConfig& cfg) {
  fs::create_directories(dir);
  std::ofstream out(dir / name);
  if (!out) throw std::runtime_error("cannot write " + (dir / name).string());
  out.precision(17);
  out << "# seed=" << cfg.experiment.seed << " version=" << version_string()
      << " config_hash=" << std::hex << config_hash(cfg) << std::dec << "\n";
  return out;
}

void write_theory(const fs::path& dir, const ParsedConfig& cfg,
                  const TheoryReport& rep) {
  std::ofstream out = open_csv(dir, "theory_report.csv", cfg);
  out << "quantity,node,value_re,value_im\n";
  const int n = cfg.scenario.num_nodes;
  for (int k = 0; k < n; ++k) {
    const auto ku = static_cast<std::size_t>(k);
    out << "success_prob," << k + 1 << "," << rep.success_probs[ku] << ",0\n";
    out << "eq_power," << k + 1 << "," << rep.eq_power[ku] << ",0\n";
    out << "eff_link_noise_var," << k + 1 << ","
        << std::real(rep.eff_link_cov[ku](0, 0)) << ",0\n";
    out << "hat_noise_var," << k + 1 << "," << rep.hat_noise_var[ku] << ",0\n";
  }
  for (int j = 0; j < cfg.scenario.dim; ++j) {
    out << "biased_opt_w" << j + 1 << ",0," << std::real(rep.biased_opt(j))
        << "," << std::imag(rep.biased_opt(j)) << "\n";
    out << "unbiased_opt_w" << j + 1 << ",0," << std::real(rep.unbiased_opt(j))
        << "," << std::imag(rep.unbiased_opt(j)) << "\n";
    out << "bias_w" << j + 1 << ",0," << std::real(rep.bias(j)) << ","
        << std::imag(rep.bias(j)) << "\n";
  }
  out << "clms_mu_max,0," << rep.clms_mu_max << ",0\n";
  out << "bc_mu_max,0," << rep.bc_mu_max << ",0\n";
  out << "bc_step,0," << rep.bc_step << ",0\n";
  out << "steady_msd,0," << rep.steady_msd << ",0\n";
  out << "steady_msd_db,0," << 10.0 * std::log10(rep.steady_msd) << ",0\n";
}

void write_simulation(const fs::path& dir, const ParsedConfig& cfg,
                      const ExperimentResult& res) {
  {
    std::ofstream out = open_csv(dir, "msd_trajectory.csv", cfg);
    out << "iter";
    for (const auto& a : res.algorithms)
      out << ",msd_" << a.label << ",msd_db_" << a.label;
    out << "\n";
    for (int i = 0; i < cfg.experiment.iterations; ++i) {
      out << i;
      for (const auto& a : res.algorithms) {
        const double m = a.msd[static_cast<std::size_t>(i)];
        out << "," << m << "," << 10.0 * std::log10(m);
      }
      out << "\n";
    }
  }
  {
    std::ofstream out = open_csv(dir, "mean_error.csv", cfg);
    out << "iter";
    for (const auto& a : res.algorithms)
      for (int j = 0; j < cfg.scenario.dim; ++j)
        out << "," << a.label << "_err" << j + 1 << "_re," << a.label << "_err"
            << j + 1 << "_im";
    out << "\n";
    for (int i = 0; i < cfg.experiment.iterations; ++i) {
      out << i;
      for (const auto& a : res.algorithms)
        for (int j = 0; j < cfg.scenario.dim; ++j) {
          const Cplx e = a.mean_error[static_cast<std::size_t>(i)](j);
          out << "," << std::real(e) << "," << std::imag(e);
        }
      out << "\n";
    }
  }
  for (const auto& a : res.algorithms) {
    std::cout << a.label << ": steady-state MSD " << a.steady_msd_db
              << " dB, diverged trials " << a.diverged_trials << "\n";
  }
}

/// Pass/fail evaluation behind the `compare` subcommand. Returns true when
/// every configured tolerance holds.
bool evaluate_comparison(const ParsedConfig& cfg, const ExperimentResult& res,
                         const TheoryReport& rep, const fs::path& dir) {
  std::ofstream out = open_csv(dir, "comparison.csv", cfg);
  out << "quantity,empirical,predicted,abs_delta,rel_delta\n";
  for (const auto& row : compare_with_theory(res, rep, cfg.scenario))
    out << row.quantity << "," << row.empirical << "," << row.predicted << ","
        << row.abs_delta << "," << row.rel_delta << "\n";

  bool ok = true;
  auto report = [&ok](const std::string& what, bool pass) {
    std::cout << (pass ? "PASS " : "FAIL ") << what << "\n";
    ok = ok && pass;
  };

  const double draws = static_cast<double>(res.link_draws_per_node);
  for (std::size_t k = 0; k < rep.success_probs.size(); ++k) {
    const double p = rep.success_probs[k];
    const double se = std::sqrt(p * (1.0 - p) / draws);
    report("success_prob node " + std::to_string(k + 1),
           std::abs(res.success_rate[k] - p) <= cfg.tolerances.success_se * se);
  }
  for (const auto& a : res.algorithms) {
    if (a.label == "clms") {
      for (int j = 0; j < cfg.scenario.dim; ++j) {
        const double tol = std::max(cfg.tolerances.bias_rel * std::abs(rep.bias(j)),
                                    cfg.tolerances.bias_abs);
        report("clms bias component " + std::to_string(j + 1),
               std::abs(a.empirical_bias(j) - rep.bias(j)) <= tol);
      }
    } else if (a.label == "bc_clms") {
      const double pred_db = 10.0 * std::log10(rep.steady_msd);
      report("bc_clms steady-state MSD (" + std::to_string(a.steady_msd_db) +
                 " dB vs " + std::to_string(pred_db) + " dB)",
             std::abs(a.steady_msd_db - pred_db) <= cfg.tolerances.msd_db);
    }
  }
  return ok;
}

void run_sweep(const ParsedConfig& base, const fs::path& dir) {
  if (base.sweep_param.empty() || base.sweep_values.empty())
    throw ConfigError("sweep requires sweep_param and sweep_values in the config");
  std::ofstream out = open_csv(dir, "sweep.csv", base);
  out << base.sweep_param;
  for (const auto& a : base.experiment.algorithms)
    out << ",steady_msd_db_" << a.label << ",diverged_" << a.label;
  out << "\n";
  for (double value : base.sweep_values) {
    ParsedConfig cfg = base;
    if (base.sweep_param == "step_size") {
      for (auto& a : cfg.experiment.algorithms) a.step = value;
    } else if (base.sweep_param == "chan_est_err_var") {
      cfg.scenario.chan_est_err_var = value;
      cfg.experiment.scenario = cfg.scenario;
    } else {
      cfg.scenario.fading_corr = value;
      cfg.experiment.scenario = cfg.scenario;
    }
    const ExperimentResult res = run_ensemble(cfg.experiment);
    out << value;
    for (const auto& a : res.algorithms)
      out << "," << a.steady_msd_db << "," << a.diverged_trials;
    out << "\n";
    std::cout << base.sweep_param << " = " << value << " done\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"CLMS / BC-CLMS estimation laboratory"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = "out";
  std::optional<std::uint64_t> seed_override;
  std::optional<int> trials_override;
  std::optional<int> iters_override;
  app.add_option("--config", config_path, "scenario + experiment config file")
      ->required();
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--seed", seed_override, "override the ensemble seed");
  app.add_option("--trials", trials_override, "override the ensemble size");
  app.add_option("--iters", iters_override, "override the iteration count");

  auto* cmd_theory = app.add_subcommand("theory", "write the closed-form report");
  auto* cmd_sim = app.add_subcommand("simulate", "run the Monte Carlo ensemble");
  auto* cmd_cmp = app.add_subcommand("compare", "simulate and check against theory");
  auto* cmd_sweep = app.add_subcommand("sweep", "run the configured parameter grid");
  // Let the global flags appear on either side of the subcommand name.
  for (auto* cmd : {cmd_theory, cmd_sim, cmd_cmp, cmd_sweep}) cmd->fallthrough();

  CLI11_PARSE(app, argc, argv);

  try {
    ParsedConfig cfg = parse_config(read_file(config_path));
    if (seed_override) cfg.experiment.seed = *seed_override;
    if (trials_override) cfg.experiment.trials = *trials_override;
    if (iters_override) {
      cfg.experiment.iterations = *iters_override;
      cfg.experiment.window = std::min(cfg.experiment.window, *iters_override);
    }
    const fs::path dir(out_dir);

    if (cmd_theory->parsed()) {
      write_theory(dir, cfg, make_theory_report(cfg.scenario, cfg.bc_step_size));
    } else if (cmd_sim->parsed()) {
      write_simulation(dir, cfg, run_ensemble(cfg.experiment));
    } else if (cmd_cmp->parsed()) {
      const TheoryReport rep = make_theory_report(cfg.scenario, cfg.bc_step_size);
      const ExperimentResult res = run_ensemble(cfg.experiment);
      write_simulation(dir, cfg, res);
      if (!evaluate_comparison(cfg, res, rep, dir)) return kExitTolerance;
    } else if (cmd_sweep->parsed()) {
      run_sweep(cfg, dir);
    }
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalidInput;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalidInput;
  } catch (const std::runtime_error& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitOk;
}
