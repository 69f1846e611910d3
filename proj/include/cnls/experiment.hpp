#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "cnls/checks.hpp"
#include "cnls/initial_data.hpp"
#include "cnls/trajectory.hpp"

namespace cnls {

inline constexpr int kConfigSchema = 1;

/// Everything one experiment run depends on. The text form is flat
/// `key = value` lines ('#' starts a comment); see serialize() for the
/// canonical key order. Unknown keys are errors.
struct ExperimentConfig {
  int schema = kConfigSchema;
  int dim = 3;
  int n = 32;
  double box_length = 16.0;
  InitialDataSpec data;
  std::uint64_t seed = 1;
  SolverConfig solver;
  std::vector<double> deltas{0.1};
  std::vector<std::string> suites;
  std::filesystem::path out = "out";
  bool save_snapshots = false;

  DecayWindow decay;
  LemmaWindow lemma;
  /// Morawetz horizons: [0, morawetz_t1] against [0, t_end].
  double morawetz_t1 = 0.5;
  /// Ledger sample every this many snapshots on [1, t_end].
  int ledger_stride = 1;
  /// Also run the Besov sum on a grid with 2n points per axis.
  bool besov_refine = true;
  BilinearOptions bilinear;

  Grid grid() const;
  /// Canonical text. Excludes nothing but `out`, so the hash names the
  /// numerical content of a run, not where it was written.
  std::string serialize() const;
  /// serialize() plus the `out` line: the full file form.
  std::string to_text() const;
  std::uint64_t hash() const;
  /// Throws std::invalid_argument on any inconsistency.
  void validate() const;

  friend bool operator==(const ExperimentConfig& a, const ExperimentConfig& b) {
    return a.serialize() == b.serialize() && a.out == b.out;
  }
};

/// Parses config text; throws std::invalid_argument naming the line.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// 64-bit FNV-1a.
std::uint64_t fnv1a64(const std::string& bytes) noexcept;

/// Names accepted in `suites`.
const std::vector<std::string>& known_suites();

}  // namespace cnls
