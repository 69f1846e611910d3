#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "cnls/decay_fit.hpp"

namespace cnls {

/// How `fitted` is compared with `target`:
///   at_most  fitted <= target + tolerance
///   below    fitted <  target + tolerance
///   within   |fitted - target| <= tolerance
enum class PassRule : std::uint8_t { at_most, below, within };

std::string to_string(PassRule rule);
PassRule pass_rule_from_string(const std::string& name);

/// One verdict. Decay checks store the fitted exponent in `fitted`; other
/// checks store their statistic there and the threshold in `target`, so every
/// verdict is recomputable from the stored numbers alone.
struct CheckReport {
  static constexpr double kNotApplicable = std::numeric_limits<double>::quiet_NaN();

  std::string name;
  double target = 0.0;
  double fitted = 0.0;
  double premult_sup = 0.0;
  double tolerance = 0.0;
  PassRule rule = PassRule::at_most;
  /// Window-shift stability (max/min ratio); NaN when not part of the rule.
  double stability = kNotApplicable;
  double stability_tol = kNotApplicable;
  bool passed = false;
  /// Full fit when the check fitted a decay rate (not serialized).
  std::optional<DecayFit> fit;

  /// The pass rule applied to the recorded numbers: rule(fitted, target,
  /// tolerance), premult_sup finite, and stability <= 1 + stability_tol when
  /// stability_tol is set.
  bool evaluate() const;
  /// Sets `passed` from evaluate() and returns *this.
  CheckReport& finalize();
};

/// Finalized report without stability requirement.
CheckReport make_report(std::string name, double target, double fitted, double premult_sup,
                        double tolerance, PassRule rule);

/// Columns: name,target,fitted,premult_sup,tolerance,passed,rule,stability,stability_tol
/// after a "# config_hash=<hex>" comment line.
void write_report_csv(std::ostream& os, const std::vector<CheckReport>& reports,
                      std::uint64_t config_hash);
/// Throws std::runtime_error naming the line number of a malformed row.
std::vector<CheckReport> read_report_csv(std::istream& is);

struct ReplayMismatch {
  std::size_t index = 0;
  std::string name;
  bool stored = false;
  bool recomputed = false;
};

struct ReplayResult {
  std::vector<CheckReport> reports;
  std::vector<ReplayMismatch> mismatches;
};

ReplayResult replay_report(std::istream& is);
ReplayResult replay_report(const std::filesystem::path& csv_path);

}  // namespace cnls
