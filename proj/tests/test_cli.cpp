#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

const fs::path kWork = fs::temp_directory_path() / "clmslab_cli_test";

int run_cli(const std::string& args, const fs::path& stdout_file = {}) {
  std::string cmd = std::string(CLMSLAB_CLI_PATH) + " " + args;
  if (!stdout_file.empty())
    cmd += " > " + stdout_file.string() + " 2>&1";
  else
    cmd += " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  REQUIRE(status != -1);
  return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path write_file(const std::string& name, const std::string& text) {
  fs::create_directories(kWork);
  const fs::path p = kWork / name;
  std::ofstream out(p);
  out << text;
  return p;
}

std::string small_config() {
  return "num_nodes = 1\n"
         "dim = 1\n"
         "true_weights = [0.5-0.25j]\n"
         "mode = digital\n"
         "tx_power = 2\n"
         "path_loss_exp = 2.2\n"
         "nominal_range = 0.5\n"
         "meas_noise_var = 0.1\n"
         "link_noise_var = 0.05\n"
         "fading_var = 1.3\n"
         "regressor_corr = 0\n"
         "node_x = [0.7]\n"
         "node_y = [0]\n"
         "fusion_x = 0\n"
         "fusion_y = 0\n"
         "step_size = 0.05\n"
         "iterations = 1500\n"
         "trials = 300\n"
         "window = 500\n"
         "seed = 11\n";
}

std::string shipped_config() {
  return std::string(CLMSLAB_CONFIG_DIR) + "/paper_sec5.cfg";
}

bool has_metadata_line(const std::string& csv) {
  return csv.rfind("# seed=", 0) == 0 &&
         csv.find("version=clmslab") != std::string::npos &&
         csv.find("config_hash=") != std::string::npos;
}

std::string second_line(const std::string& text) {
  const auto a = text.find('\n');
  const auto b = text.find('\n', a + 1);
  return text.substr(a + 1, b - a - 1);
}

long count_lines(const std::string& text) {
  long n = 0;
  for (char c : text)
    if (c == '\n') ++n;
  return n;
}

}  // namespace

TEST_CASE("theory subcommand writes the closed-form report") {
  const fs::path out = kWork / "theory_out";
  fs::remove_all(out);
  const int rc =
      run_cli("--config " + shipped_config() + " theory --out " + out.string());
  CHECK(rc == 0);
  const std::string csv = slurp(out / "theory_report.csv");
  CHECK(has_metadata_line(csv));
  CHECK(second_line(csv) == "quantity,node,value_re,value_im");
  CHECK(csv.find("success_prob,1,") != std::string::npos);
  CHECK(csv.find("bias_w1,0,") != std::string::npos);
  CHECK(csv.find("steady_msd_db,0,") != std::string::npos);
}

TEST_CASE("simulate subcommand: schema, row counts, reproducibility") {
  const fs::path cfg = write_file("small.cfg", small_config());
  const fs::path out1 = kWork / "sim1";
  const fs::path out2 = kWork / "sim2";
  fs::remove_all(out1);
  fs::remove_all(out2);
  const std::string common =
      "--config " + cfg.string() + " --trials 5 --iters 80 simulate --out ";
  REQUIRE(run_cli(common + out1.string()) == 0);
  REQUIRE(run_cli(common + out2.string()) == 0);

  const std::string msd = slurp(out1 / "msd_trajectory.csv");
  CHECK(has_metadata_line(msd));
  CHECK(second_line(msd) == "iter,msd_clms,msd_db_clms,msd_bc_clms,msd_db_bc_clms");
  CHECK(count_lines(msd) == 2 + 80);  // metadata + header + one row per iteration

  const std::string err = slurp(out1 / "mean_error.csv");
  CHECK(second_line(err) ==
        "iter,clms_err1_re,clms_err1_im,bc_clms_err1_re,bc_clms_err1_im");
  CHECK(count_lines(err) == 2 + 80);

  SUBCASE("identical invocations are byte-identical") {
    CHECK(slurp(out2 / "msd_trajectory.csv") == msd);
    CHECK(slurp(out2 / "mean_error.csv") == err);
  }
  SUBCASE("the seed override changes the data") {
    const fs::path out3 = kWork / "sim3";
    fs::remove_all(out3);
    REQUIRE(run_cli("--config " + cfg.string() +
                    " --trials 5 --iters 80 --seed 99 simulate --out " +
                    out3.string()) == 0);
    CHECK(slurp(out3 / "msd_trajectory.csv") != msd);
  }
}

TEST_CASE("compare subcommand passes on a well-resolved scenario") {
  const fs::path cfg = write_file("small.cfg", small_config());
  const fs::path out = kWork / "cmp_ok";
  const fs::path log = kWork / "cmp_ok.log";
  fs::remove_all(out);
  const int rc = run_cli(
      "--config " + cfg.string() + " compare --out " + out.string(), log);
  const std::string text = slurp(log);
  INFO(text);
  CHECK(rc == 0);
  CHECK(text.find("PASS success_prob node 1") != std::string::npos);
  CHECK(text.find("PASS clms bias component 1") != std::string::npos);
  CHECK(text.find("PASS bc_clms steady-state MSD") != std::string::npos);
  CHECK(text.find("FAIL") == std::string::npos);
  const std::string csv = slurp(out / "comparison.csv");
  CHECK(has_metadata_line(csv));
  CHECK(second_line(csv) == "quantity,empirical,predicted,abs_delta,rel_delta");
}

TEST_CASE("compare subcommand fails with exit code 1 on a hopeless tolerance") {
  const fs::path cfg =
      write_file("strict.cfg", small_config() + "msd_tol_db = 1e-9\n");
  const fs::path out = kWork / "cmp_bad";
  const fs::path log = kWork / "cmp_bad.log";
  fs::remove_all(out);
  const int rc = run_cli(
      "--config " + cfg.string() + " compare --out " + out.string(), log);
  CHECK(rc == 1);
  CHECK(slurp(log).find("FAIL bc_clms steady-state MSD") != std::string::npos);
}

TEST_CASE("sweep subcommand writes one row per grid point") {
  const fs::path cfg = write_file(
      "sweep.cfg",
      small_config() + "sweep_param = step_size\nsweep_values = [0.02, 0.05]\n");
  const fs::path out = kWork / "sweep_out";
  fs::remove_all(out);
  REQUIRE(run_cli("--config " + cfg.string() +
                  " --trials 5 --iters 200 sweep --out " + out.string()) == 0);
  const std::string csv = slurp(out / "sweep.csv");
  CHECK(has_metadata_line(csv));
  CHECK(second_line(csv) ==
        "step_size,steady_msd_db_clms,diverged_clms,steady_msd_db_bc_clms,"
        "diverged_bc_clms");
  CHECK(count_lines(csv) == 2 + 2);
  // Grid values lead their rows (0.05 prints at full double precision).
  CHECK(csv.find("\n0.02,") != std::string::npos);
  CHECK(csv.find("\n0.05") != std::string::npos);
}

TEST_CASE("invalid input exits with code 2") {
  SUBCASE("missing config file") {
    CHECK(run_cli("--config " + (kWork / "nope.cfg").string() + " theory") == 2);
  }
  SUBCASE("empty config") {
    const fs::path cfg = write_file("empty.cfg", "");
    CHECK(run_cli("--config " + cfg.string() + " theory") == 2);
  }
  SUBCASE("negative path loss exponent") {
    std::string text = small_config();
    text.replace(text.find("path_loss_exp = 2.2"),
                 std::string("path_loss_exp = 2.2").size(),
                 "path_loss_exp = -1");
    const fs::path cfg = write_file("badalpha.cfg", text);
    CHECK(run_cli("--config " + cfg.string() + " theory") == 2);
  }
  SUBCASE("sweep without sweep keys") {
    const fs::path cfg = write_file("nosweep.cfg", small_config());
    CHECK(run_cli("--config " + cfg.string() + " sweep") == 2);
  }
}

TEST_CASE("numerical failure exits with code 3") {
  // Step size far beyond the stability bound: every trial diverges.
  std::string text = small_config();
  text.replace(text.find("step_size = 0.05"),
               std::string("step_size = 0.05").size(), "step_size = 50");
  const fs::path cfg = write_file("diverge.cfg", text);
  const fs::path out = kWork / "diverge_out";
  fs::remove_all(out);
  CHECK(run_cli("--config " + cfg.string() + " --trials 3 --iters 300 simulate "
                "--out " + out.string()) == 3);
}
