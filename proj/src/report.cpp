#include "cnls/report.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

#include "cnls/csv.hpp"

namespace cnls {
namespace {

constexpr const char* kHeader = "name,target,fitted,premult_sup,tolerance,passed,rule,stability,stability_tol";

}  // namespace

std::string to_string(PassRule rule) {
  switch (rule) {
    case PassRule::at_most: return "at_most";
    case PassRule::below: return "below";
    case PassRule::within: return "within";
  }
  return "?";
}

PassRule pass_rule_from_string(const std::string& name) {
  for (auto r : {PassRule::at_most, PassRule::below, PassRule::within}) {
    if (to_string(r) == name) return r;
  }
  throw std::invalid_argument("unknown pass rule '" + name + "'");
}

bool CheckReport::evaluate() const {
  bool ok = false;
  switch (rule) {
    case PassRule::at_most: ok = fitted <= target + tolerance; break;
    case PassRule::below: ok = fitted < target + tolerance; break;
    case PassRule::within: ok = std::abs(fitted - target) <= tolerance; break;
  }
  if (!std::isfinite(premult_sup)) ok = false;
  if (!std::isnan(stability_tol) && !(stability <= 1.0 + stability_tol)) ok = false;
  return ok;
}

CheckReport& CheckReport::finalize() {
  passed = evaluate();
  return *this;
}

CheckReport make_report(std::string name, double target, double fitted, double premult_sup,
                        double tolerance, PassRule rule) {
  CheckReport r;
  r.name = std::move(name);
  r.target = target;
  r.fitted = fitted;
  r.premult_sup = premult_sup;
  r.tolerance = tolerance;
  r.rule = rule;
  return r.finalize();
}

void write_report_csv(std::ostream& os, const std::vector<CheckReport>& reports,
                      std::uint64_t config_hash) {
  using csv::format_number;
  os << "# config_hash=" << csv::format_hash(config_hash) << "\n" << kHeader << "\n";
  for (const auto& r : reports) {
    if (r.name.find_first_of(",\n") != std::string::npos) {
      throw std::invalid_argument("report name contains a separator: " + r.name);
    }
    os << r.name << "," << format_number(r.target) << "," << format_number(r.fitted) << ","
       << format_number(r.premult_sup) << "," << format_number(r.tolerance) << ","
       << (r.passed ? "true" : "false") << "," << to_string(r.rule) << ","
       << format_number(r.stability) << "," << format_number(r.stability_tol) << "\n";
  }
}

std::vector<CheckReport> read_report_csv(std::istream& is) {
  std::vector<CheckReport> out;
  std::string line;
  std::size_t lineno = 0;
  bool header = false;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    if (!header) {
      if (line != kHeader) throw std::runtime_error("line " + std::to_string(lineno) + ": unexpected header");
      header = true;
      continue;
    }
    try {
      const auto c = csv::split(line);
      if (c.size() != 9) throw std::invalid_argument("expected 9 columns, found " + std::to_string(c.size()));
      CheckReport r;
      r.name = c[0];
      if (r.name.empty()) throw std::invalid_argument("empty check name");
      r.target = csv::parse_number(c[1]);
      r.fitted = csv::parse_number(c[2]);
      r.premult_sup = csv::parse_number(c[3]);
      r.tolerance = csv::parse_number(c[4]);
      if (c[5] == "true") {
        r.passed = true;
      } else if (c[5] == "false") {
        r.passed = false;
      } else {
        throw std::invalid_argument("passed must be true or false");
      }
      r.rule = pass_rule_from_string(c[6]);
      r.stability = csv::parse_number(c[7]);
      r.stability_tol = csv::parse_number(c[8]);
      out.push_back(std::move(r));
    } catch (const std::invalid_argument& e) {
      throw std::runtime_error("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  if (!header) throw std::runtime_error("missing header row");
  return out;
}

ReplayResult replay_report(std::istream& is) {
  ReplayResult res;
  res.reports = read_report_csv(is);
  for (std::size_t i = 0; i < res.reports.size(); ++i) {
    const auto& r = res.reports[i];
    const bool again = r.evaluate();
    if (again != r.passed) res.mismatches.push_back({i, r.name, r.passed, again});
  }
  return res;
}

ReplayResult replay_report(const std::filesystem::path& csv_path) {
  std::ifstream is(csv_path);
  if (!is) throw std::runtime_error("cannot open " + csv_path.string());
  return replay_report(is);
}

}  // namespace cnls
