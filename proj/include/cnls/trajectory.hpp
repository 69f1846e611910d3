#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cnls/field.hpp"

namespace cnls {

enum class Dealias : std::uint8_t { two_thirds, none };

struct SolverConfig {
  double dt = 1e-3;
  double t_end = 1.0;
  int snapshot_stride = 1;
  Dealias dealias = Dealias::two_thirds;
  /// Abort threshold on the sup norm; 0 selects 1e4 times the initial sup norm.
  double amplitude_guard = 0.0;
};

/// Raised when the sup norm crosses the amplitude guard.
struct GuardTrip {
  double t = 0.0;
  double sup_norm = 0.0;
};

/// Time-ordered snapshots of one solver run, held in the physical
/// representation.
struct Trajectory {
  Grid grid = Grid::make(1, 8, 1.0);
  std::vector<double> times;
  std::vector<Field> snapshots;
  SolverConfig config;
  /// Initial-data descriptor, e.g. "gaussian amplitude=1 sigma=0.44".
  std::string provenance;
  std::uint64_t seed = 0;
  std::optional<GuardTrip> guard_trip;

  std::size_t size() const noexcept { return times.size(); }
  bool empty() const noexcept { return times.empty(); }
  double t_first() const { return times.front(); }
  double t_last() const { return times.back(); }
  /// Index of the snapshot at time t (within 1e-9 relative to the spacing),
  /// or nullopt.
  std::optional<std::size_t> index_of(double t) const;
  /// Throws std::invalid_argument unless [t_lo, t_hi] lies inside the
  /// recorded time range.
  void require_covers(double t_lo, double t_hi) const;
};

}  // namespace cnls
