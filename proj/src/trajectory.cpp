#include "cnls/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cnls {

std::optional<std::size_t> Trajectory::index_of(double t) const {
  if (times.empty()) return std::nullopt;
  const auto it = std::lower_bound(times.begin(), times.end(), t);
  const double scale = times.size() > 1 ? (times.back() - times.front()) / (times.size() - 1) : 1.0;
  const double tol = 1e-9 * std::max(scale, 1e-300);
  std::optional<std::size_t> best;
  for (auto cand : {it, it == times.begin() ? it : it - 1}) {
    if (cand == times.end()) continue;
    if (std::abs(*cand - t) <= tol) best = static_cast<std::size_t>(cand - times.begin());
  }
  return best;
}

void Trajectory::require_covers(double t_lo, double t_hi) const {
  if (!(t_lo <= t_hi)) throw std::invalid_argument("time interval is reversed");
  if (times.empty()) throw std::invalid_argument("trajectory is empty");
  const double scale = std::max(std::abs(times.back()), 1.0);
  if (t_lo < times.front() - 1e-12 * scale || t_hi > times.back() + 1e-12 * scale) {
    throw std::invalid_argument("interval [" + std::to_string(t_lo) + ", " + std::to_string(t_hi) +
                                "] not covered by snapshots on [" + std::to_string(times.front()) +
                                ", " + std::to_string(times.back()) + "]");
  }
}

}  // namespace cnls
