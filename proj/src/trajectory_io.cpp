#include "cnls/trajectory_io.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <stdexcept>

#include "cnls/csv.hpp"
#include "cnls/snapshot_io.hpp"

namespace cnls {
namespace {

std::string snapshot_name(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "snap_%06zu.cnls", i);
  return buf;
}

}  // namespace

std::string to_string(Dealias d) { return d == Dealias::two_thirds ? "two_thirds" : "none"; }

Dealias dealias_from_string(const std::string& name) {
  if (name == "two_thirds") return Dealias::two_thirds;
  if (name == "none") return Dealias::none;
  throw std::invalid_argument("unknown dealias mode '" + name + "'");
}

void write_trajectory(const std::filesystem::path& dir, const Trajectory& traj,
                      std::uint64_t config_hash) {
  using csv::format_number;
  std::filesystem::create_directories(dir);
  for (std::size_t i = 0; i < traj.size(); ++i) {
    write_snapshot(dir / snapshot_name(i), traj.snapshots[i], traj.times[i]);
  }
  std::ofstream os(dir / "trajectory.txt", std::ios::trunc);
  if (!os) throw std::runtime_error("cannot write " + (dir / "trajectory.txt").string());
  os << "config_hash=" << csv::format_hash(config_hash) << "\n"
     << "dt=" << format_number(traj.config.dt) << "\n"
     << "t_end=" << format_number(traj.config.t_end) << "\n"
     << "snapshot_stride=" << traj.config.snapshot_stride << "\n"
     << "dealias=" << to_string(traj.config.dealias) << "\n"
     << "amplitude_guard=" << format_number(traj.config.amplitude_guard) << "\n"
     << "provenance=" << traj.provenance << "\n"
     << "seed=" << traj.seed << "\n"
     << "snapshots=" << traj.size() << "\n";
  if (traj.guard_trip) {
    os << "guard_trip_t=" << format_number(traj.guard_trip->t) << "\n"
       << "guard_trip_sup=" << format_number(traj.guard_trip->sup_norm) << "\n";
  }
  if (!os) throw std::runtime_error("failed writing trajectory index");
}

Trajectory read_trajectory(const std::filesystem::path& dir) {
  std::ifstream is(dir / "trajectory.txt");
  if (!is) throw std::runtime_error("no trajectory index in " + dir.string());
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(is, line)) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    kv[line.substr(0, eq)] = line.substr(eq + 1);
  }
  const auto get = [&](const std::string& key) -> const std::string& {
    const auto it = kv.find(key);
    if (it == kv.end()) throw std::runtime_error("trajectory index lacks '" + key + "'");
    return it->second;
  };
  Trajectory traj;
  try {
    traj.config.dt = csv::parse_number(get("dt"));
    traj.config.t_end = csv::parse_number(get("t_end"));
    traj.config.snapshot_stride = std::stoi(get("snapshot_stride"));
    traj.config.dealias = dealias_from_string(get("dealias"));
    traj.config.amplitude_guard = csv::parse_number(get("amplitude_guard"));
    traj.provenance = get("provenance");
    traj.seed = std::stoull(get("seed"));
    const auto count = std::stoull(get("snapshots"));
    if (kv.count("guard_trip_t")) {
      traj.guard_trip = GuardTrip{csv::parse_number(get("guard_trip_t")),
                                  csv::parse_number(get("guard_trip_sup"))};
    }
    for (std::size_t i = 0; i < count; ++i) {
      Snapshot s = read_snapshot(dir / snapshot_name(i));
      if (i == 0) {
        traj.grid = s.field.grid();
      } else if (!(s.field.grid() == traj.grid)) {
        throw std::runtime_error("snapshot " + std::to_string(i) + " is on a different grid");
      }
      if (i > 0 && !(s.t > traj.times.back())) throw std::runtime_error("snapshot times not increasing");
      traj.times.push_back(s.t);
      s.field.convert(Representation::physical);
      traj.snapshots.push_back(std::move(s.field));
    }
  } catch (const std::invalid_argument& e) {
    throw std::runtime_error(std::string("bad trajectory index: ") + e.what());
  }
  return traj;
}

}  // namespace cnls
