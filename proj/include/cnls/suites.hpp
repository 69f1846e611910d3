#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "cnls/experiment.hpp"
#include "cnls/report.hpp"
#include "cnls/trajectory.hpp"

namespace cnls {

/// Process exit codes of the runner.
enum ExitCode : int { kExitOk = 0, kExitConfigError = 1, kExitGuardTrip = 2, kExitCheckFailure = 3 };

struct SuiteOutcome {
  std::string suite;
  std::vector<CheckReport> reports;
  /// Suite verdict. Usually every report passed; lemma24 passes when the v or
  /// the w series passes for every delta.
  bool passed = true;
  bool guard_tripped = false;
  /// Files written, relative to the output directory.
  std::vector<std::string> artifacts;
};

struct RunResult {
  int exit_code = kExitOk;
  std::string error;
  std::vector<SuiteOutcome> suites;
};

/// Runs every suite named in cfg.suites into cfg.out: norm series, ledgers
/// and report CSVs, config.txt and manifest.txt. Suites that do not share
/// state run on up to `threads` workers; outputs do not depend on it.
RunResult run_suite(const ExperimentConfig& cfg, int threads = 1);

/// Runs one suite against a stored trajectory (suites that only need the
/// initial data use its first snapshot). Report CSV and series go to
/// `out_dir`, named as in run_suite.
SuiteOutcome verify_suite(const std::string& suite, const Trajectory& traj, const ExperimentConfig& cfg,
                          const std::filesystem::path& out_dir);

/// Writes manifest.txt: a timestamp line (the only line that varies between
/// identical runs), then schema, config hash, suites, exit code and artifacts.
void write_manifest(const std::filesystem::path& dir, const ExperimentConfig& cfg, const RunResult& result);

}  // namespace cnls
