#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include <json.hpp>

namespace {

struct RunResult {
  int exit_code = -1;
  std::string output;
};

RunResult run_cli(const std::string& args) {
  const std::string out_file = "cli_stdout.txt";
  const std::string cmd = std::string(BK_CLI_PATH) + " " + args + " > " + out_file + " 2>&1";
  const int raw = std::system(cmd.c_str());
  RunResult r;
  r.exit_code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  std::ifstream in(out_file);
  std::stringstream ss;
  ss << in.rdbuf();
  r.output = ss.str();
  return r;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("audit: builtin potential passes and reports r0") {
  auto r = run_cli("audit --potential builtin:appendix_d --dim 7 --out cli_out_a");
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("0.21320071") != std::string::npos);
  CHECK(r.output.find("PASS") != std::string::npos);
  auto j = nlohmann::json::parse(slurp("cli_out_a/audit.json"));
  CHECK(j["pass"] == true);
  CHECK(std::abs(j["r_star"].get<double>() - 0.2132007163556104) < 1e-10);
  CHECK(std::abs(j["V_at_critical_point"].get<double>() - 0.5) < 1e-10);
}

TEST_CASE("audit: V == 1 fails with a distinct exit code") {
  auto r = run_cli("audit --potential \"V=1\" --dim 7 --out cli_out_b");
  CHECK(r.exit_code == 2);
  CHECK(r.output.find("no critical point found") != std::string::npos);
}

TEST_CASE("audit: minus face reported") {
  auto r = run_cli("audit --potential builtin:appendix_d --dim 7 --face minus --out cli_out_c");
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("minus face") != std::string::npos);
}

TEST_CASE("crash exit code differs from audit failure") {
  auto r = run_cli("audit --potential \"r +\" --dim 7 --out cli_out_d");
  CHECK(r.exit_code == 1);  // malformed input is a crash, not an audit verdict
  auto r2 = run_cli("pohozaev --preset nonsense --out cli_out_d2");
  CHECK(r2.exit_code == 1);
}

TEST_CASE("constants writes CSV and JSON with fingerprints") {
  auto r = run_cli("constants --dim 7 --out cli_out_e");
  CHECK(r.exit_code == 0);
  const std::string csv = slurp("cli_out_e/constants.csv");
  CHECK(csv.find("A1") != std::string::npos);
  CHECK(csv.find("radial_gauss#200") != std::string::npos);
  auto j = nlohmann::json::parse(slurp("cli_out_e/constants.json"));
  CHECK(j["A1"].get<double>() > 0.0);
  // JSON summaries round-trip
  CHECK(nlohmann::json::parse(j.dump()) == j);
}

TEST_CASE("scaling: summary exponent and byte-identical reruns") {
  auto r1 = run_cli("scaling --dim 7 --seed 5 --out cli_out_f");
  CHECK(r1.exit_code == 0);
  auto j = nlohmann::json::parse(slurp("cli_out_f/scaling.json"));
  CHECK(std::abs(j["fitted_exponent"].get<double>() - 5.0 / 3.0) < 0.05);
  const std::string csv1 = slurp("cli_out_f/scaling.csv");
  auto r2 = run_cli("scaling --dim 7 --seed 5 --out cli_out_g");
  CHECK(r2.exit_code == 0);
  CHECK(slurp("cli_out_g/scaling.csv") == csv1);  // determinism, byte for byte
  CHECK(csv1.find("n,mu_star") != std::string::npos);
}

TEST_CASE("scaling refuses a potential that fails the audit") {
  auto r = run_cli("scaling --potential \"V=1\" --dim 7 --out cli_out_h");
  CHECK(r.exit_code == 2);
}

TEST_CASE("reduced: single-n critical point") {
  auto r = run_cli("reduced --n 64 --dim 7 --out cli_out_i");
  CHECK(r.exit_code == 0);
  auto j = nlohmann::json::parse(slurp("cli_out_i/reduced.json"));
  CHECK(std::abs(j["t_star"].get<double>() - 0.2132007163556104) < 1e-6);
  CHECK(j["grad_norm"].get<double>() < 1e-9);
}

TEST_CASE("pohozaev presets pass their tolerances") {
  auto r = run_cli("pohozaev --preset gaussian-ball-3d --order 40 --out cli_out_j");
  CHECK(r.exit_code == 0);
  auto j = nlohmann::json::parse(slurp("cli_out_j/pohozaev.json"));
  CHECK(j["worst_relative_discrepancy"].get<double>() < 1e-6);
}

TEST_CASE("residual ladder slope") {
  auto r = run_cli("residual --dim 7 --n 8 --mu-base 60 --mu-ladder 4 --out cli_out_k");
  CHECK(r.exit_code == 0);
  auto j = nlohmann::json::parse(slurp("cli_out_k/residual.json"));
  CHECK(j["fitted_slope"].get<double>() <= -1.0);
  CHECK(j["strictly_decreasing"] == true);
}

TEST_CASE("config file drives a run") {
  {
    std::ofstream cfg("cli_cfg.ini");
    cfg << "# test config\n[run]\ndim = 7\nout = cli_out_l\n\n[potential]\n"
           "expr = builtin:appendix_d\n";
  }
  auto r = run_cli("audit --config cli_cfg.ini");
  CHECK(r.exit_code == 0);
  CHECK(slurp("cli_out_l/audit.json").find("\"pass\": true") != std::string::npos);
}
