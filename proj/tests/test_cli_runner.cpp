#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "cnls/checks.hpp"
#include "cnls/csv.hpp"
#include "cnls/decomposition.hpp"
#include "cnls/experiment.hpp"
#include "cnls/initial_data.hpp"
#include "cnls/report.hpp"
#include "cnls/solver.hpp"
#include "cnls/suites.hpp"

using namespace cnls;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("cnls_cli_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(CNLS_CLI) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

// Small lemma-window run: N = 32, L = 20, t in [0, 1].
const char* kSmallRun = R"(schema = 1
dim = 3
n = 32
box_length = 20
data = gaussian
amplitude = 1
sigma = 0.8
dt = 0.004
t_end = 1
snapshot_stride = 2
deltas = 0.1
)";

const char* kFast = R"(schema = 1
dim = 3
n = 64
box_length = 32
data = gaussian
sigma = 0.34
suites = dispersive,scaling
)";

std::map<std::string, std::string> csv_files(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (e.path().extension() == ".csv") out[fs::relative(e.path(), dir).string()] = slurp(e.path());
  }
  return out;
}

std::string without_timestamp(const std::string& manifest) { return manifest.substr(manifest.find('\n') + 1); }

}  // namespace

TEST_CASE("config text round trip and hash") {
  ExperimentConfig cfg = parse_config(std::string(kSmallRun) + "suites = lemma22,lemma23\nout = /tmp/x\n");
  CHECK(cfg.n == 32);
  CHECK(cfg.solver.dt == 0.004);
  CHECK(cfg.suites == std::vector<std::string>{"lemma22", "lemma23"});
  CHECK(cfg.out == fs::path("/tmp/x"));

  const ExperimentConfig back = parse_config(cfg.to_text());
  CHECK(back == cfg);
  CHECK(back.serialize() == cfg.serialize());
  CHECK(back.hash() == cfg.hash());
  CHECK(parse_config(back.to_text()).to_text() == cfg.to_text());

  ExperimentConfig moved = cfg;
  moved.out = "/elsewhere";
  CHECK(moved.hash() == cfg.hash());
  ExperimentConfig changed = cfg;
  changed.seed = 2;
  CHECK(changed.hash() != cfg.hash());

  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);

  ExperimentConfig defaults;
  CHECK(parse_config(defaults.to_text()) == defaults);
}

TEST_CASE("config errors name the line") {
  const auto message = [](const std::string& text) {
    try {
      parse_config(text);
    } catch (const std::invalid_argument& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  CHECK(message("schema = 1\nn = 32\nwidth = 3\n").find("line 3") != std::string::npos);
  CHECK(message("schema = 1\nwidth = 3\n").find("unknown key 'width'") != std::string::npos);
  CHECK(message("n = 32\n# comment\nn = 64\n").find("line 3") != std::string::npos);
  CHECK(message("n = 32x\n").find("line 1") != std::string::npos);
  CHECK(message("dealias = sometimes\n").find("line 1") != std::string::npos);
  CHECK(message("just words\n").find("line 1") != std::string::npos);
  CHECK(message("n = 32\n").empty());

  CHECK_THROWS_AS(parse_config("schema = 2\n").validate(), std::invalid_argument);
  CHECK_THROWS_AS(parse_config("suites = lemma99\n").validate(), std::invalid_argument);
  CHECK_THROWS_AS(parse_config("deltas = 0.1,1.5\n").validate(), std::invalid_argument);
  CHECK_THROWS_AS(parse_config("n = 24\n").validate(), std::invalid_argument);
  CHECK_THROWS_AS(parse_config("dt = 1\n").validate(), std::invalid_argument);
  CHECK_NOTHROW(parse_config(kSmallRun).validate());
  for (const auto& s : known_suites()) CHECK_NOTHROW(parse_config(std::string(kSmallRun) + "suites = " + s).validate());
}

TEST_CASE("empty suite list writes only the manifest") {
  ExperimentConfig cfg = parse_config(kSmallRun);
  cfg.out = scratch("empty");
  const RunResult r = run_suite(cfg);
  CHECK(r.exit_code == kExitOk);
  CHECK(r.suites.empty());
  std::vector<std::string> files;
  for (const auto& e : fs::directory_iterator(cfg.out)) files.push_back(e.path().filename().string());
  CHECK(files == std::vector<std::string>{"manifest.txt"});
  const std::string m = slurp(cfg.out / "manifest.txt");
  CHECK(m.rfind("timestamp=", 0) == 0);
  CHECK(m.find("exit_code=0\n") != std::string::npos);
  CHECK(m.find("config_hash=" + csv::format_hash(cfg.hash())) != std::string::npos);
  fs::remove_all(cfg.out);
}

TEST_CASE("identical configs give byte-identical artifacts") {
  ExperimentConfig cfg = parse_config(kFast);
  cfg.out = scratch("det_a");
  const RunResult a = run_suite(cfg, 1);
  ExperimentConfig cfg2 = cfg;
  cfg2.out = scratch("det_b");
  const RunResult b = run_suite(cfg2, 2);
  CHECK(a.exit_code == b.exit_code);

  const auto fa = csv_files(cfg.out);
  const auto fb = csv_files(cfg2.out);
  CHECK(fa.size() >= 4);
  CHECK(fa == fb);
  for (const auto& [name, body] : fa) CHECK(body.rfind("# config_hash=" + csv::format_hash(cfg.hash()) + "\n", 0) == 0);
  CHECK(without_timestamp(slurp(cfg.out / "manifest.txt")) == without_timestamp(slurp(cfg2.out / "manifest.txt")));
  CHECK(slurp(cfg.out / "config.txt") == slurp(cfg2.out / "config.txt"));
  fs::remove_all(cfg.out);
  fs::remove_all(cfg2.out);
}

TEST_CASE("exit codes") {
  SUBCASE("config error") {
    ExperimentConfig cfg = parse_config(std::string(kSmallRun) + "suites = dispersive\n");
    cfg.solver.dt = 1.0;
    cfg.out = scratch("exit1");
    const RunResult r = run_suite(cfg);
    CHECK(r.exit_code == kExitConfigError);
    CHECK_FALSE(r.error.empty());
    fs::remove_all(cfg.out);
  }
  SUBCASE("guard trip") {
    ExperimentConfig cfg = parse_config(std::string(kSmallRun) + "suites = lemma22,dispersive\namplitude_guard = 0.5\n");
    cfg.out = scratch("exit2");
    const RunResult r = run_suite(cfg);
    CHECK(r.exit_code == kExitGuardTrip);
    CHECK(slurp(cfg.out / "manifest.txt").find("suite.lemma22=guard_trip") != std::string::npos);
    fs::remove_all(cfg.out);
  }
  SUBCASE("check failure") {
    // A wide Gaussian has not entered its decay regime before T_valid.
    ExperimentConfig cfg = parse_config(std::string(kFast));
    cfg.data.sigma = 3.0;
    cfg.suites = {"dispersive"};
    cfg.out = scratch("exit3");
    const RunResult r = run_suite(cfg);
    CHECK(r.exit_code == kExitCheckFailure);
    CHECK(slurp(cfg.out / "manifest.txt").find("suite.dispersive=fail") != std::string::npos);
    fs::remove_all(cfg.out);
  }
}

TEST_CASE("lemma22 suite reproduces the direct check") {
  ExperimentConfig cfg = parse_config(std::string(kSmallRun) + "suites = lemma22\n");
  cfg.out = scratch("lemma22");
  const RunResult r = run_suite(cfg);
  REQUIRE(r.suites.size() == 1);
  REQUIRE(r.suites[0].reports.size() == 2);

  const Trajectory tr = evolve(make_initial_data(cfg.grid(), cfg.data, cfg.seed), cfg.solver);
  const auto [v, gv] = check_lemma_2_2(tr, 0.1);

  std::ifstream is(cfg.out / "lemma22_report.csv");
  const ReplayResult rr = replay_report(is);
  CHECK(rr.mismatches.empty());
  REQUIRE(rr.reports.size() == 2);
  CHECK(rr.reports[0].name == v.name + "_d0.1");
  CHECK(rr.reports[1].name == gv.name + "_d0.1");
  CHECK(rr.reports[0].fitted == v.fitted);
  CHECK(rr.reports[0].premult_sup == v.premult_sup);
  CHECK(rr.reports[1].fitted == gv.fitted);
  CHECK(rr.reports[0].passed == v.passed);
  CHECK(fs::exists(cfg.out / "lemma22_v_sup_d0.1.csv"));
  CHECK(fs::exists(cfg.out / "lemma22_grad_v_sup_d0.1.csv"));
  fs::remove_all(cfg.out);
}

TEST_CASE("command-line front end") {
  const fs::path dir = scratch("cli");
  fs::create_directories(dir);
  {
    std::ofstream os(dir / "run.cfg");
    os << kSmallRun;
  }
  {
    std::ofstream os(dir / "bad.cfg");
    os << kSmallRun << "colour = blue\n";
  }

  CHECK(run_cli("evolve --config " + (dir / "run.cfg").string() + " --out " + (dir / "traj").string()) == 0);
  CHECK(fs::exists(dir / "traj" / "trajectory.txt"));
  CHECK(fs::exists(dir / "traj" / "manifest.txt"));
  // The coarse run is too short for the decay regime, so the verdict is a failure.
  CHECK(run_cli("verify --suite lemma22 --traj " + (dir / "traj").string() + " --out " + (dir / "r.csv").string()) ==
        kExitCheckFailure);
  CHECK(fs::exists(dir / "r.csv"));
  CHECK(run_cli("replay --report " + (dir / "r.csv").string()) == 0);

  std::string tampered = slurp(dir / "r.csv");
  const auto pos = tampered.find(",false,");
  REQUIRE(pos != std::string::npos);
  tampered.replace(pos, 7, ",true,");
  {
    std::ofstream os(dir / "t.csv");
    os << tampered;
  }
  CHECK(run_cli("replay --report " + (dir / "t.csv").string()) == kExitCheckFailure);

  CHECK(run_cli("fit --series " + (dir / "lemma22_v_sup_d0.1.csv").string()) == 0);
  CHECK(run_cli("decompose --traj " + (dir / "traj").string() + " --delta 0.1 --times 0.8,1 --out " +
                (dir / "ledger.csv").string()) == kExitConfigError);
  CHECK(run_cli("decompose --traj " + (dir / "traj").string() + " --delta 0.1 --out " + (dir / "ledger.csv").string()) ==
        0);
  CHECK(slurp(dir / "ledger.csv").rfind("# config_hash=", 0) == 0);
  CHECK(run_cli("report --config " + (dir / "bad.cfg").string() + " --out " + (dir / "bad").string()) ==
        kExitConfigError);
  CHECK(run_cli("report --config /nonexistent.cfg") == kExitConfigError);
  CHECK(run_cli("frobnicate") == kExitConfigError);
  fs::remove_all(dir);
}
