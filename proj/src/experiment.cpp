#include "cnls/experiment.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>

#include "cnls/csv.hpp"
#include "cnls/solver.hpp"
#include "cnls/trajectory_io.hpp"

namespace cnls {
namespace {

using csv::format_number;

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

double to_double(const std::string& v) { return csv::parse_number(v); }

long long to_int(const std::string& v) {
  std::size_t pos = 0;
  const long long x = std::stoll(v, &pos);
  if (pos != v.size()) throw std::invalid_argument("not an integer: '" + v + "'");
  return x;
}

bool to_bool(const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw std::invalid_argument("not a boolean: '" + v + "'");
}

std::vector<std::string> split_list(const std::string& v, char sep = ',') {
  std::vector<std::string> out;
  if (trim(v).empty()) return out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(trim(item));
  return out;
}

template <class T, class F>
std::string join(const std::vector<T>& xs, F&& fmt, char sep = ',') {
  std::string s;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) s += sep;
    s += fmt(xs[i]);
  }
  return s;
}

struct Key {
  const char* name;
  std::function<std::string(const ExperimentConfig&)> get;
  std::function<void(ExperimentConfig&, const std::string&)> set;
};

const std::vector<Key>& keys() {
  using C = ExperimentConfig;
  using S = const std::string&;
  static const std::vector<Key> table = {
      {"schema", [](const C& c) { return std::to_string(c.schema); },
       [](C& c, S v) { c.schema = static_cast<int>(to_int(v)); }},
      {"dim", [](const C& c) { return std::to_string(c.dim); },
       [](C& c, S v) { c.dim = static_cast<int>(to_int(v)); }},
      {"n", [](const C& c) { return std::to_string(c.n); }, [](C& c, S v) { c.n = static_cast<int>(to_int(v)); }},
      {"box_length", [](const C& c) { return format_number(c.box_length); },
       [](C& c, S v) { c.box_length = to_double(v); }},
      {"data", [](const C& c) { return to_string(c.data.family); },
       [](C& c, S v) { c.data.family = data_family_from_string(v); }},
      {"amplitude", [](const C& c) { return format_number(c.data.amplitude); },
       [](C& c, S v) { c.data.amplitude = to_double(v); }},
      {"sigma", [](const C& c) { return format_number(c.data.sigma); },
       [](C& c, S v) { c.data.sigma = to_double(v); }},
      {"alpha", [](const C& c) { return format_number(c.data.alpha); },
       [](C& c, S v) { c.data.alpha = to_double(v); }},
      {"k_lo", [](const C& c) { return format_number(c.data.k_lo); }, [](C& c, S v) { c.data.k_lo = to_double(v); }},
      {"k_hi", [](const C& c) { return format_number(c.data.k_hi); }, [](C& c, S v) { c.data.k_hi = to_double(v); }},
      {"envelope", [](const C& c) { return format_number(c.data.envelope); },
       [](C& c, S v) { c.data.envelope = to_double(v); }},
      {"mode",
       [](const C& c) {
         return std::to_string(c.data.mode[0]) + ":" + std::to_string(c.data.mode[1]) + ":" +
                std::to_string(c.data.mode[2]);
       },
       [](C& c, S v) {
         const auto parts = split_list(v, ':');
         if (parts.size() != 3) throw std::invalid_argument("mode needs three ':'-separated integers");
         for (int a = 0; a < 3; ++a) c.data.mode[a] = static_cast<int>(to_int(parts[a]));
       }},
      {"seed", [](const C& c) { return std::to_string(c.seed); }, [](C& c, S v) { c.seed = std::stoull(v); }},
      {"dt", [](const C& c) { return format_number(c.solver.dt); }, [](C& c, S v) { c.solver.dt = to_double(v); }},
      {"t_end", [](const C& c) { return format_number(c.solver.t_end); },
       [](C& c, S v) { c.solver.t_end = to_double(v); }},
      {"snapshot_stride", [](const C& c) { return std::to_string(c.solver.snapshot_stride); },
       [](C& c, S v) { c.solver.snapshot_stride = static_cast<int>(to_int(v)); }},
      {"dealias", [](const C& c) { return to_string(c.solver.dealias); },
       [](C& c, S v) { c.solver.dealias = dealias_from_string(v); }},
      {"amplitude_guard", [](const C& c) { return format_number(c.solver.amplitude_guard); },
       [](C& c, S v) { c.solver.amplitude_guard = to_double(v); }},
      {"deltas", [](const C& c) { return join(c.deltas, [](double d) { return format_number(d); }); },
       [](C& c, S v) {
         c.deltas.clear();
         for (const auto& s : split_list(v)) c.deltas.push_back(to_double(s));
       }},
      {"suites", [](const C& c) { return join(c.suites, [](const std::string& s) { return s; }); },
       [](C& c, S v) { c.suites = split_list(v); }},
      {"save_snapshots", [](const C& c) { return std::string(c.save_snapshots ? "true" : "false"); },
       [](C& c, S v) { c.save_snapshots = to_bool(v); }},
      {"decay_t_lo", [](const C& c) { return format_number(c.decay.t_lo); },
       [](C& c, S v) { c.decay.t_lo = to_double(v); }},
      {"decay_t_hi", [](const C& c) { return format_number(c.decay.t_hi); },
       [](C& c, S v) { c.decay.t_hi = to_double(v); }},
      {"decay_samples", [](const C& c) { return std::to_string(c.decay.samples); },
       [](C& c, S v) { c.decay.samples = static_cast<int>(to_int(v)); }},
      {"lemma_t_lo", [](const C& c) { return format_number(c.lemma.t_lo); },
       [](C& c, S v) { c.lemma.t_lo = to_double(v); }},
      {"lemma_t_hi", [](const C& c) { return format_number(c.lemma.t_hi); },
       [](C& c, S v) { c.lemma.t_hi = to_double(v); }},
      {"lemma_samples", [](const C& c) { return std::to_string(c.lemma.samples); },
       [](C& c, S v) { c.lemma.samples = static_cast<int>(to_int(v)); }},
      {"morawetz_t1", [](const C& c) { return format_number(c.morawetz_t1); },
       [](C& c, S v) { c.morawetz_t1 = to_double(v); }},
      {"ledger_stride", [](const C& c) { return std::to_string(c.ledger_stride); },
       [](C& c, S v) { c.ledger_stride = static_cast<int>(to_int(v)); }},
      {"besov_refine", [](const C& c) { return std::string(c.besov_refine ? "true" : "false"); },
       [](C& c, S v) { c.besov_refine = to_bool(v); }},
      {"bilinear_n", [](const C& c) { return std::to_string(c.bilinear.n); },
       [](C& c, S v) { c.bilinear.n = static_cast<int>(to_int(v)); }},
      {"bilinear_box_length", [](const C& c) { return format_number(c.bilinear.box_length); },
       [](C& c, S v) { c.bilinear.box_length = to_double(v); }},
      {"bilinear_window_scale", [](const C& c) { return format_number(c.bilinear.window_scale); },
       [](C& c, S v) { c.bilinear.window_scale = to_double(v); }},
      {"bilinear_time_samples", [](const C& c) { return std::to_string(c.bilinear.time_samples); },
       [](C& c, S v) { c.bilinear.time_samples = static_cast<int>(to_int(v)); }},
      {"bilinear_trials", [](const C& c) { return std::to_string(c.bilinear.trials); },
       [](C& c, S v) { c.bilinear.trials = static_cast<int>(to_int(v)); }},
      {"bilinear_gaps", [](const C& c) { return join(c.bilinear.gaps, [](int g) { return std::to_string(g); }); },
       [](C& c, S v) {
         c.bilinear.gaps.clear();
         for (const auto& s : split_list(v)) c.bilinear.gaps.push_back(static_cast<int>(to_int(s)));
       }},
      {"bilinear_k_min", [](const C& c) { return std::to_string(c.bilinear.k_min); },
       [](C& c, S v) { c.bilinear.k_min = static_cast<int>(to_int(v)); }},
  };
  return table;
}

}  // namespace

std::uint64_t fnv1a64(const std::string& bytes) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

const std::vector<std::string>& known_suites() {
  static const std::vector<std::string> names = {"dispersive", "lemma21", "lemma22", "lemma23", "lemma24",
                                                 "lemma31", "bilinear", "morawetz", "gronwall", "scaling"};
  return names;
}

Grid ExperimentConfig::grid() const { return Grid::make(dim, n, box_length); }

std::string ExperimentConfig::serialize() const {
  std::string s;
  for (const auto& k : keys()) s += std::string(k.name) + " = " + k.get(*this) + "\n";
  return s;
}

std::string ExperimentConfig::to_text() const { return serialize() + "out = " + out.string() + "\n"; }

std::uint64_t ExperimentConfig::hash() const { return fnv1a64(serialize()); }

void ExperimentConfig::validate() const {
  if (schema != kConfigSchema) {
    throw std::invalid_argument("unsupported config schema " + std::to_string(schema));
  }
  const Grid g = grid();
  cnls::validate(solver, g);
  for (double d : deltas) {
    if (!(d > 0.0 && d < 1.0)) throw std::invalid_argument("every delta must lie in (0, 1)");
  }
  for (const auto& s : suites) {
    if (std::find(known_suites().begin(), known_suites().end(), s) == known_suites().end()) {
      throw std::invalid_argument("unknown suite '" + s + "'");
    }
  }
  if (ledger_stride < 1) throw std::invalid_argument("ledger_stride must be >= 1");
  if (data.family == DataFamily::gaussian && !(data.sigma > 0.0)) {
    throw std::invalid_argument("sigma must be positive");
  }
  if (bilinear.trials < 1 || bilinear.time_samples < 2) {
    throw std::invalid_argument("bilinear needs trials >= 1 and time_samples >= 2");
  }
}

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig cfg;
  std::istringstream is(text);
  std::string line;
  std::size_t lineno = 0;
  std::vector<std::string> seen;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = "config line " + std::to_string(lineno) + ": ";
    if (eq == std::string::npos) throw std::invalid_argument(where + "expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (std::find(seen.begin(), seen.end(), key) != seen.end()) {
      throw std::invalid_argument(where + "duplicate key '" + key + "'");
    }
    seen.push_back(key);
    try {
      if (key == "out") {
        cfg.out = value;
        continue;
      }
      const auto& table = keys();
      const auto it = std::find_if(table.begin(), table.end(), [&](const Key& k) { return key == k.name; });
      if (it == table.end()) throw std::invalid_argument("unknown key '" + key + "'");
      it->set(cfg, value);
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument(where + e.what());
    } catch (const std::out_of_range&) {
      throw std::invalid_argument(where + "value out of range for '" + key + "'");
    }
  }
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw std::invalid_argument("cannot open config " + path.string());
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_config(ss.str());
}

}  // namespace cnls
