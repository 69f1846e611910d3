// Command-line front end: evolve, decompose, verify, fit, report, replay.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "cnls/csv.hpp"
#include "cnls/decay_fit.hpp"
#include "cnls/decomposition.hpp"
#include "cnls/experiment.hpp"
#include "cnls/initial_data.hpp"
#include "cnls/norms.hpp"
#include "cnls/solver.hpp"
#include "cnls/suites.hpp"
#include "cnls/trajectory_io.hpp"

namespace fs = std::filesystem;
using namespace cnls;

namespace {

struct Globals {
  int threads = 1;
  std::optional<std::uint64_t> seed;
  std::string out;
};

ExperimentConfig load_with_overrides(const std::string& path, const Globals& g) {
  ExperimentConfig cfg = load_config(path);
  if (g.seed) cfg.seed = *g.seed;
  if (!g.out.empty()) cfg.out = g.out;
  return cfg;
}

/// The config stored next to a trajectory, or defaults when absent.
ExperimentConfig config_for_trajectory(const fs::path& dir) {
  const fs::path p = dir / "config.txt";
  return fs::exists(p) ? load_config(p) : ExperimentConfig{};
}

void print_reports(const std::vector<CheckReport>& reports) {
  for (const auto& r : reports) {
    std::printf("  %-32s %s  fitted=%-12.6g target=%-10.6g tol=%-6.3g premult_sup=%.6g\n", r.name.c_str(),
                r.passed ? "pass" : "FAIL", r.fitted, r.target, r.tolerance, r.premult_sup);
  }
}

int cmd_evolve(const std::string& config_path, const Globals& g) {
  ExperimentConfig cfg = load_with_overrides(config_path, g);
  cfg.validate();
  const Field u0 = make_initial_data(cfg.grid(), cfg.data, cfg.seed);
  const Trajectory traj = evolve(u0, cfg.solver, describe(cfg.data, cfg.seed), cfg.seed);
  write_trajectory(cfg.out, traj, cfg.hash());
  {
    std::ofstream os(cfg.out / "config.txt", std::ios::trunc);
    os << "# config_hash=" << csv::format_hash(cfg.hash()) << "\n" << cfg.serialize();
  }
  RunResult rr;
  rr.exit_code = traj.guard_trip ? kExitGuardTrip : kExitOk;
  write_manifest(cfg.out, cfg, rr);
  const double m0 = mass(traj.snapshots.front());
  const double m1 = mass(traj.snapshots.back());
  const double e0 = energy(traj.snapshots.front());
  const double e1 = energy(traj.snapshots.back());
  std::printf("snapshots=%zu t_last=%.6g mass_drift=%.3e energy_drift=%.3e\n", traj.size(), traj.t_last(),
              m0 > 0 ? std::abs(m1 - m0) / m0 : 0.0, e0 > 0 ? std::abs(e1 - e0) / e0 : 0.0);
  if (traj.guard_trip) {
    std::fprintf(stderr, "amplitude guard tripped at t=%.6g (sup norm %.6g)\n", traj.guard_trip->t,
                 traj.guard_trip->sup_norm);
    return kExitGuardTrip;
  }
  return kExitOk;
}

std::vector<double> parse_times(const std::string& list) {
  std::vector<double> out;
  std::stringstream ss(list);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (!tok.empty()) out.push_back(csv::parse_number(tok));
  }
  return out;
}

int cmd_decompose(const std::string& traj_dir, double delta, const std::string& times, const std::string& out,
                  const Globals& g) {
  const Trajectory traj = read_trajectory(traj_dir);
  const ExperimentConfig cfg = config_for_trajectory(traj_dir);
  std::vector<double> samples = parse_times(times);
  if (samples.empty()) {
    for (double t : traj.times) {
      if (t >= 1.0 - 1e-12) samples.push_back(t);
    }
  }
  const auto ledgers = ledger_series(traj, delta, samples);
  const std::string path = !out.empty() ? out : (!g.out.empty() ? g.out : std::string("ledger.csv"));
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw std::runtime_error("cannot write " + path);
  write_ledger_csv(os, ledgers, cfg.hash());
  std::printf("wrote %zu ledger rows to %s (envelope constant %.6g)\n", ledgers.size(), path.c_str(),
              envelope_constant(ledgers));
  return kExitOk;
}

int cmd_verify(const std::string& suite, const std::string& traj_dir, const std::string& out, const Globals& g) {
  const Trajectory traj = read_trajectory(traj_dir);
  ExperimentConfig cfg = config_for_trajectory(traj_dir);
  if (g.seed) cfg.seed = *g.seed;
  const fs::path report = !out.empty() ? fs::path(out) : fs::path(!g.out.empty() ? g.out : "report.csv");
  const fs::path dir = report.has_parent_path() ? report.parent_path() : fs::path(".");
  const SuiteOutcome o = verify_suite(suite, traj, cfg, dir);
  const fs::path written = dir / (suite + "_report.csv");
  if (fs::exists(written) && !fs::equivalent(written, report)) fs::rename(written, report);
  std::printf("%s: %s\n", suite.c_str(), o.guard_tripped ? "guard trip" : (o.passed ? "pass" : "FAIL"));
  print_reports(o.reports);
  if (o.guard_tripped) return kExitGuardTrip;
  return o.passed ? kExitOk : kExitCheckFailure;
}

int cmd_fit(const std::string& series_path, double lo, double hi) {
  std::ifstream is(series_path);
  if (!is) throw std::runtime_error("cannot open " + series_path);
  const NormSeries s = read_norm_series_csv(is);
  if (s.empty()) throw std::invalid_argument("series is empty");
  const double a = lo > 0 ? lo : s.times().front();
  const double b = hi > 0 ? hi : s.times().back();
  const DecayFit f = fit_decay_rate(s, a, b);
  std::printf("exponent=%s\nlog_prefactor=%s\nresidual_rms=%s\nt_lo=%s\nt_hi=%s\nn_samples=%d\n",
              csv::format_number(f.exponent).c_str(), csv::format_number(f.log_prefactor).c_str(),
              csv::format_number(f.residual_rms).c_str(), csv::format_number(f.t_lo).c_str(),
              csv::format_number(f.t_hi).c_str(), f.n_samples);
  return kExitOk;
}

int cmd_report(const std::string& config_path, const Globals& g) {
  const ExperimentConfig cfg = load_with_overrides(config_path, g);
  const RunResult r = run_suite(cfg, g.threads);
  if (!r.error.empty()) std::fprintf(stderr, "error: %s\n", r.error.c_str());
  for (const auto& o : r.suites) {
    std::printf("%s: %s\n", o.suite.c_str(), o.guard_tripped ? "guard trip" : (o.passed ? "pass" : "FAIL"));
    print_reports(o.reports);
  }
  std::printf("exit_code=%d\n", r.exit_code);
  return r.exit_code;
}

int cmd_replay(const std::string& path) {
  const ReplayResult r = replay_report(fs::path(path));
  for (const auto& m : r.mismatches) {
    std::printf("mismatch: row %zu (%s) stored=%s recomputed=%s\n", m.index + 1, m.name.c_str(),
                m.stored ? "true" : "false", m.recomputed ? "true" : "false");
  }
  std::printf("%zu reports, %zu mismatches\n", r.reports.size(), r.mismatches.size());
  return r.mismatches.empty() ? kExitOk : kExitCheckFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Defocusing cubic NLS laboratory on a periodic box"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  std::uint64_t seed = 0;
  app.add_option("--threads", g.threads, "Worker threads for independent suites")->check(CLI::PositiveNumber);
  auto* seed_opt = app.add_option("--seed", seed, "Override the config seed");
  app.add_option("--out", g.out, "Output path override");

  std::string config, traj, times, out, suite, series, report;
  double delta = 0.1, lo = 0.0, hi = 0.0;

  auto* ev = app.add_subcommand("evolve", "Run the solver and store the trajectory");
  ev->add_option("--config", config, "Config file")->required();

  auto* de = app.add_subcommand("decompose", "Energy ledger from a stored trajectory");
  de->add_option("--traj", traj, "Trajectory directory")->required();
  de->add_option("--delta", delta, "Split parameter in (0,1)");
  de->add_option("--times", times, "Comma-separated sample times (default: all snapshots >= 1)");
  de->add_option("--out", out, "Ledger CSV");

  auto* ve = app.add_subcommand("verify", "Run one check suite on a stored trajectory");
  ve->add_option("--suite", suite, "Suite name")->required();
  ve->add_option("--traj", traj, "Trajectory directory")->required();
  ve->add_option("--out", out, "Report CSV");

  auto* fi = app.add_subcommand("fit", "Fit a power law to a norm series CSV");
  fi->add_option("--series", series, "NormSeries CSV")->required();
  fi->add_option("--lo", lo, "Window start (default: first sample)");
  fi->add_option("--hi", hi, "Window end (default: last sample)");

  auto* re = app.add_subcommand("report", "Run the suites named in a config");
  re->add_option("--config", config, "Config file")->required();

  auto* rp = app.add_subcommand("replay", "Recompute pass flags of a report CSV");
  rp->add_option("--report", report, "Report CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfigError;
  }
  if (seed_opt->count() > 0) g.seed = seed;

  try {
    if (*ev) return cmd_evolve(config, g);
    if (*de) return cmd_decompose(traj, delta, times, out, g);
    if (*ve) return cmd_verify(suite, traj, out, g);
    if (*fi) return cmd_fit(series, lo, hi);
    if (*re) return cmd_report(config, g);
    if (*rp) return cmd_replay(report);
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitConfigError;
  }
  return kExitOk;
}
