#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "catch_amalgamated.hpp"

#include "catapult/catapult.hpp"

namespace fs = std::filesystem;
using Catch::Matchers::ContainsSubstring;

namespace {

std::string cli_bin() {
  const char* bin = std::getenv("CATAPULT_BIN");
  REQUIRE(bin != nullptr);
  return bin;
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("catapult_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

int run_cli(const std::string& args, const fs::path& log) {
  const std::string cmd = cli_bin() + " " + args + " > " + log.string() + " 2>&1";
  const int rc = std::system(cmd.c_str());
  if (rc == -1) return -1;
  return WEXITSTATUS(rc);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("simulate writes a predictor trajectory", "[cli]") {
  const fs::path dir = fresh_dir("sim_pred");
  const int rc = run_cli(
      "simulate --example ex1 --loss exp --w0 1.0 --eta 0.5 "
      "--stop gradtol --stop-value 1e-6 --steps 5000 --out " + dir.string(),
      dir / "log.txt");
  REQUIRE(rc == 0);

  const std::string csv = slurp(dir / "trajectory.csv");
  REQUIRE(csv.rfind("step,loss,grad_norm,w_norm\n", 0) == 0);
  const std::string meta = slurp(dir / "metadata.json");
  REQUIRE_THAT(meta, ContainsSubstring("\"mode\": \"predictor\""));
  REQUIRE_THAT(meta, ContainsSubstring("\"w0\": 1.0"));
  REQUIRE_THAT(meta, ContainsSubstring("\"terminal\": \"Converged\""));
  REQUIRE_THAT(slurp(dir / "log.txt"), ContainsSubstring("terminal=Converged"));
}

TEST_CASE("simulate writes a network trajectory", "[cli]") {
  const fs::path dir = fresh_dir("sim_net");
  const int rc = run_cli(
      "simulate --example ex3 --loss exp --m 200 --sigma-w2 0.5 --seed 9 "
      "--eta 1.0 --steps 200 --out " + dir.string(),
      dir / "log.txt");
  REQUIRE(rc == 0);
  const std::string csv = slurp(dir / "trajectory.csv");
  REQUIRE(csv.rfind("step,loss,f,lambda_ntk\n", 0) == 0);
  REQUIRE_THAT(slurp(dir / "metadata.json"), ContainsSubstring("\"mode\": \"network\""));
}

TEST_CASE("critical-lr prints and stores the closed form", "[cli]") {
  const fs::path dir = fresh_dir("clr");
  const int rc = run_cli("critical-lr --loss exp --w0 1.0 --out " + dir.string(),
                         dir / "log.txt");
  REQUIRE(rc == 0);
  REQUIRE_THAT(slurp(dir / "log.txt"), ContainsSubstring("eta_critical"));
  REQUIRE_THAT(slurp(dir / "critical_lr.json"), ContainsSubstring("1.7018362564786431"));

  // Non-degenerate data has no scalar reduction to take a critical rate from.
  const int rc2 = run_cli("critical-lr --example ex2 --loss exp --w0 1.0 --out " +
                              dir.string(),
                          dir / "log2.txt");
  REQUIRE(rc2 == 2);
}

TEST_CASE("sweep artifacts are deterministic", "[cli]") {
  const fs::path a = fresh_dir("sweep_a");
  const fs::path b = fresh_dir("sweep_b");
  const std::string common =
      "sweep --example ex3 --loss exp --m 300 --sigma-w2 0.5 --seed 9 "
      "--etas 0.5,1.0,1.6 --steps 400 --out ";
  REQUIRE(run_cli(common + a.string(), a / "log.txt") == 0);
  REQUIRE(run_cli(common + b.string(), b / "log.txt") == 0);

  const std::string csv = slurp(a / "sweep.csv");
  REQUIRE(csv.rfind("eta,phase,final_loss,final_lambda,lambda_init,steps_run,seed\n", 0) == 0);
  REQUIRE(csv == slurp(b / "sweep.csv"));

  const fs::path c = fresh_dir("sweep_svg");
  REQUIRE(run_cli(common + c.string() + " --format svg", c / "log.txt") == 0);
  REQUIRE(slurp(c / "sweep.svg").rfind("<?xml", 0) == 0);
}

TEST_CASE("boundaries recovers the predictor critical rate", "[cli]") {
  const fs::path dir = fresh_dir("bounds");
  const int rc = run_cli(
      "boundaries --example ex1 --loss exp --w0 1.0 --etas 1.0,1.5,2.0,2.5 "
      "--tol 1e-9 --out " + dir.string(),
      dir / "log.txt");
  REQUIRE(rc == 0);
  const std::string json = slurp(dir / "boundaries.json");
  const std::size_t pos = json.find("\"eta0\":");
  REQUIRE(pos != std::string::npos);
  const double eta0 = std::strtod(json.c_str() + pos + 7, nullptr);
  REQUIRE(std::abs(eta0 - 1.7018362564786431) <= 1e-6);
}

TEST_CASE("hessian-check reports the flatness ratio", "[cli]") {
  const fs::path dir = fresh_dir("hess");
  const int rc = run_cli(
      "hessian-check --example ex1 --loss exp --m 40 --sigma-w2 0.5 --seed 4 "
      "--etas 0.4 --steps 2000 --out " + dir.string(),
      dir / "log.txt");
  REQUIRE(rc == 0);
  const std::string csv = slurp(dir / "hessian.csv");
  REQUIRE(csv.rfind("eta,top_ntk,top_hessian,ratio,converged\n", 0) == 0);

  // Parse the one data row and confirm the ratio column sits at 1.
  std::istringstream rows(csv.substr(csv.find('\n') + 1));
  std::string line;
  REQUIRE(std::getline(rows, line));
  std::istringstream fields(line);
  std::string eta_s, ntk_s, hess_s, ratio_s, conv_s;
  REQUIRE(std::getline(fields, eta_s, ','));
  REQUIRE(std::getline(fields, ntk_s, ','));
  REQUIRE(std::getline(fields, hess_s, ','));
  REQUIRE(std::getline(fields, ratio_s, ','));
  REQUIRE(std::getline(fields, conv_s));
  REQUIRE(conv_s == "1");
  REQUIRE(std::abs(std::strtod(ratio_s.c_str(), nullptr) - 1.0) <= 1e-3);
}

TEST_CASE("cifar-demo runs on a fixture batch", "[cli]") {
  const fs::path dir = fresh_dir("cifar");
  const fs::path batch = dir / "batch.bin";
  catapult::write_cifar10_fixture(batch.string(), {1, 5, 1, 5});

  const std::string base = "cifar-demo --cifar " + batch.string() +
                           " --class-a 1 --class-b 5 --width 32 --depth 2 --loss log "
                           "--eta 0.05 --steps 30 --seed 1 ";
  REQUIRE(run_cli(base + "--n-train 2 --n-test 2 --out " + dir.string(),
                  dir / "log.txt") == 0);
  const std::string csv = slurp(dir / "cifar_demo.csv");
  REQUIRE(csv.rfind("eta,steps_run,final_loss,train_accuracy,test_accuracy\n", 0) == 0);
  REQUIRE(std::count(csv.begin(), csv.end(), '\n') == 2);
  REQUIRE(fs::exists(dir / "run_config.json"));

  // Asking for more balanced samples than the batch holds is a data error.
  REQUIRE(run_cli(base + "--n-train 4 --n-test 2 --out " + dir.string(),
                  dir / "log2.txt") == 4);

  // A missing batch file is an I/O error.
  REQUIRE(run_cli("cifar-demo --cifar " + (dir / "absent.bin").string() +
                      " --n-train 2 --n-test 0 --out " + dir.string(),
                  dir / "log3.txt") == 3);

  // Gradient-tolerance stops make no sense for the fixed-budget demo.
  REQUIRE(run_cli(base + "--n-train 2 --n-test 2 --stop gradtol --stop-value 1e-6 --out " +
                      dir.string(),
                  dir / "log4.txt") == 2);
}

TEST_CASE("config file merges under explicit flags", "[cli]") {
  const fs::path dir = fresh_dir("config");
  {
    std::ofstream out(dir / "run.json");
    out << "{\"example\": \"ex1\", \"loss\": \"exp\", \"w0\": 1.0, \"eta\": 0.25}\n";
  }

  REQUIRE(run_cli("simulate --config " + (dir / "run.json").string() + " --steps 50 --out " +
                      dir.string(),
                  dir / "log.txt") == 0);
  REQUIRE_THAT(slurp(dir / "metadata.json"), ContainsSubstring("\"eta\": 0.25"));

  REQUIRE(run_cli("simulate --config " + (dir / "run.json").string() +
                      " --eta 1.0 --steps 50 --out " + dir.string(),
                  dir / "log2.txt") == 0);
  REQUIRE_THAT(slurp(dir / "metadata.json"), ContainsSubstring("\"eta\": 1.0"));

  // A config file that is not JSON at all is a config error.
  {
    std::ofstream out(dir / "broken.json");
    out << "not json\n";
  }
  REQUIRE(run_cli("simulate --config " + (dir / "broken.json").string() + " --out " +
                      dir.string(),
                  dir / "log3.txt") == 2);
}

TEST_CASE("usage errors exit with the config code", "[cli]") {
  const fs::path dir = fresh_dir("usage");
  REQUIRE(run_cli("", dir / "log0.txt") == 2);
  REQUIRE(run_cli("simulate --bogus-flag 3", dir / "log1.txt") == 2);
  REQUIRE(run_cli("--help", dir / "log2.txt") == 0);
  REQUIRE(run_cli("simulate --example nope --w0 1.0 --eta 0.5", dir / "log3.txt") == 2);
}
