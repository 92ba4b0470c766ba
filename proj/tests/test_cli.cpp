#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"

// End-to-end tests driving the installed CLI binary through a shell.

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

const fs::path kScratch = fs::temp_directory_path() / "qcl_test_cli_scratch";
const fs::path kConfigs = QCL_CONFIG_DIR;

struct CliResult {
  int code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& path) {
  std::ifstream in(path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

CliResult run_cli(const std::string& args) {
  static int counter = 0;
  fs::create_directories(kScratch);
  const fs::path out = kScratch / ("stdout_" + std::to_string(counter) + ".txt");
  const fs::path err = kScratch / ("stderr_" + std::to_string(counter) + ".txt");
  ++counter;
  const std::string cmd = std::string(QCL_CLI_PATH) + " " + args + " > \"" +
                          out.string() + "\" 2> \"" + err.string() + "\"";
  const int raw = std::system(cmd.c_str());
  CliResult res;
  if (raw != -1 && WIFEXITED(raw)) res.code = WEXITSTATUS(raw);
  res.out = slurp(out);
  res.err = slurp(err);
  return res;
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream stream(text);
  for (std::string line; std::getline(stream, line);) out.push_back(line);
  return out;
}

std::vector<std::string> fields_of(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream stream(line);
  for (std::string field; std::getline(stream, field, ',');) out.push_back(field);
  return out;
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = kScratch / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
}

const std::string kClosedQubit =
    "[model]\n"
    "kind = closed\n"
    "n_a = 2\n"
    "t_final = 2\n"
    "intervals = 5\n"
    "h0 = 0 0 0 -1 0 1 0 0\n"
    "control = 1 0 0 0 0 0 -1 0\n"
    "[target]\n"
    "kind = random\n";

}  // namespace

TEST_CASE("run on the trivial config: files, trace shape, and summary") {
  const fs::path out_dir = fresh_dir("trivial_run");
  const CliResult res = run_cli("run --config \"" +
                                (kConfigs / "trivial.cfg").string() + "\" --out \"" +
                                out_dir.string() + "\"");
  REQUIRE(res.code == 0);

  const json summary = json::parse(res.out);
  CHECK(summary["command"] == "run");
  CHECK(summary["ok"] == true);
  REQUIRE(summary["runs"].size() == 1);
  CHECK(summary["runs"][0]["seed"] == 0);
  CHECK(summary["runs"][0]["status"] == "converged");
  CHECK(summary["runs"][0]["iterations"] == 0);
  CHECK(summary["runs"][0]["final_F"] == 1.0);

  REQUIRE(fs::exists(out_dir / "trace_seed0.csv"));
  REQUIRE(fs::exists(out_dir / "spectra_seed0.csv"));
  REQUIRE(fs::exists(out_dir / "controls_seed0.csv"));

  const auto trace = lines_of(slurp(out_dir / "trace_seed0.csv"));
  REQUIRE(trace.size() == 2);
  CHECK(trace[0] == "iter,F,one_minus_F,J,gamma,grad_norm,rank_Gc,rank_Gcphi,degenerate");
  const auto row = fields_of(trace[1]);
  REQUIRE(row.size() == 9);
  CHECK(row[0] == "0");
  CHECK(std::stod(row[1]) == 1.0);
  CHECK(std::stod(row[3]) == 2.0);  // J = N at the top
  CHECK(std::stod(row[4]) == 0.0);  // no step produced the start

  const auto spectra = lines_of(slurp(out_dir / "spectra_seed0.csv"));
  CHECK(spectra[0] == "iter,matrix,index,sigma");
  REQUIRE(spectra.size() >= 3);
  CHECK(fields_of(spectra[1])[1] == "Gc");
  CHECK(lines_of(slurp(out_dir / "controls_seed0.csv"))[0] == "index,value");
}

TEST_CASE("run trace is monotone and reruns are byte-identical") {
  const fs::path dir_a = fresh_dir("closed_a");
  const fs::path dir_b = fresh_dir("closed_b");
  const std::string base =
      "run --config \"" + (kConfigs / "closed.cfg").string() + "\" --out \"";
  const CliResult a = run_cli(base + dir_a.string() + "\"");
  const CliResult b = run_cli(base + dir_b.string() + "\"");
  REQUIRE(a.code == 0);
  REQUIRE(b.code == 0);

  const std::string trace_a = slurp(dir_a / "trace_seed42.csv");
  CHECK(trace_a == slurp(dir_b / "trace_seed42.csv"));
  CHECK(slurp(dir_a / "spectra_seed42.csv") == slurp(dir_b / "spectra_seed42.csv"));
  CHECK(slurp(dir_a / "controls_seed42.csv") == slurp(dir_b / "controls_seed42.csv"));

  const auto rows = lines_of(trace_a);
  REQUIRE(rows.size() >= 3);
  double prev_f = -1.0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto f = fields_of(rows[i]);
    REQUIRE(f.size() == 9);
    const double fidelity = std::stod(f[1]);
    CHECK(fidelity > prev_f);
    CHECK(std::stod(f[2]) == 1.0 - fidelity);
    prev_f = fidelity;
  }

  const json summary = json::parse(a.out);
  CHECK(summary["runs"][0]["status"] == "converged");
  CHECK(summary["runs"][0]["final_one_minus_F"].get<double>() <= 1e-8);
}

TEST_CASE("seed offset relabels and reseeds the runs") {
  const fs::path dir_a = fresh_dir("offset_a");
  const fs::path dir_b = fresh_dir("offset_b");
  const std::string base =
      "run --config \"" + (kConfigs / "closed.cfg").string() + "\" --out \"";
  REQUIRE(run_cli(base + dir_a.string() + "\"").code == 0);
  REQUIRE(run_cli(base + dir_b.string() + "\" --seed-offset 1").code == 0);

  CHECK(fs::exists(dir_a / "trace_seed42.csv"));
  CHECK(!fs::exists(dir_b / "trace_seed42.csv"));
  REQUIRE(fs::exists(dir_b / "trace_seed43.csv"));
  // The shifted seed draws a different target, so the run itself differs.
  CHECK(slurp(dir_a / "trace_seed42.csv") != slurp(dir_b / "trace_seed43.csv"));
}

TEST_CASE("multi-seed runs are deterministic under concurrency") {
  const fs::path cfg_path = kScratch / "multiseed.cfg";
  write_file(cfg_path, kClosedQubit +
                           "[optimizer]\nmax_iters = 25\n"
                           "[run]\nseeds = 0 1 2 3\n");
  const fs::path par = fresh_dir("multiseed_par");
  const fs::path ser = fresh_dir("multiseed_ser");
  const std::string base = "run --config \"" + cfg_path.string() + "\" --out \"";
  const CliResult a = run_cli(base + par.string() + "\" --jobs 4");
  const CliResult b = run_cli(base + ser.string() + "\" --jobs 1");
  REQUIRE(a.code == 0);
  REQUIRE(b.code == 0);

  const json summary = json::parse(a.out);
  CHECK(summary["jobs"] == 4);
  REQUIRE(summary["runs"].size() == 4);
  for (int seed = 0; seed < 4; ++seed) {
    const std::string name = "trace_seed" + std::to_string(seed) + ".csv";
    REQUIRE(fs::exists(par / name));
    CHECK(slurp(par / name) == slurp(ser / name));
  }
}

TEST_CASE("config and usage failures exit with code 1") {
  CHECK(run_cli("run --config /nonexistent/nowhere.cfg").code == 1);
  CHECK(run_cli("run").code == 1);            // --config is required
  CHECK(run_cli("").code == 1);               // a subcommand is required
  CHECK(run_cli("frobnicate").code == 1);     // unknown subcommand
  CHECK(run_cli("run --config x --bogus").code == 1);

  const fs::path bad = kScratch / "bad.cfg";
  write_file(bad, "[model]\nkind = nonsense\n");
  const CliResult res = run_cli("run --config \"" + bad.string() + "\"");
  CHECK(res.code == 1);
  CHECK(res.err.find("unknown model kind") != std::string::npos);

  CHECK(run_cli("run --config \"" + (kConfigs / "trivial.cfg").string() +
                "\" --rank-tol -1")
            .code == 1);
}

TEST_CASE("gradcheck compares analytic and numeric gradients") {
  const CliResult res = run_cli("gradcheck --config \"" +
                                (kConfigs / "closed.cfg").string() + "\" --draws 5");
  REQUIRE(res.code == 0);
  const json summary = json::parse(res.out);
  CHECK(summary["command"] == "gradcheck");
  CHECK(summary["draws"] == 5);
  CHECK(summary["ok"] == true);
  CHECK(summary["max_rel_err_J"].get<double>() <= 1e-5);
  CHECK(summary["max_rel_err_F"].get<double>() <= 1e-5);
}

TEST_CASE("rankscan over random controls writes the report table") {
  const fs::path out_dir = fresh_dir("rankscan_random");
  const CliResult res = run_cli("rankscan --config \"" +
                                (kConfigs / "closed.cfg").string() + "\" --out \"" +
                                out_dir.string() + "\"");
  REQUIRE(res.code == 0);
  const json summary = json::parse(res.out);
  CHECK(summary["mode"] == "random_controls");
  CHECK(summary["points"] == 20);

  const auto rows = lines_of(slurp(out_dir / "rankscan.csv"));
  REQUIRE(rows.size() == 21);
  CHECK(rows[0] ==
        "point,seed,iter,F,case,borderline,rank_Gc,rank_Gcphi,required_rank,"
        "condition_met,sum_omega_mod_2pi,antisymmetric");
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto f = fields_of(rows[i]);
    REQUIRE(f.size() == 12);
    CHECK(f[2] == "-1");  // no trajectory index in random mode
    CHECK(f[4] == "CLOSED");
  }
}

TEST_CASE("rankscan can follow an ascent trajectory") {
  const fs::path cfg_path = kScratch / "trajectory.cfg";
  write_file(cfg_path, kClosedQubit +
                           "[optimizer]\nmax_iters = 15\n"
                           "[run]\nseeds = 7\n"
                           "[rankscan]\nmode = trajectory\n");
  const fs::path out_dir = fresh_dir("rankscan_traj");
  const CliResult res = run_cli("rankscan --config \"" + cfg_path.string() +
                                "\" --out \"" + out_dir.string() + "\"");
  REQUIRE(res.code == 0);
  CHECK(json::parse(res.out)["mode"] == "trajectory");

  const auto rows = lines_of(slurp(out_dir / "rankscan.csv"));
  REQUIRE(rows.size() >= 3);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto f = fields_of(rows[i]);
    CHECK(f[1] == "7");
    CHECK(f[2] == std::to_string(i - 1));  // accepted-iteration index
  }
}
