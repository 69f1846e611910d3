#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>

#include "cnls/field.hpp"
#include "cnls/trajectory.hpp"

namespace cnls {

/// Thrown by strang_step when the sup norm exceeds the amplitude guard.
class BlowupSuspected : public std::runtime_error {
 public:
  explicit BlowupSuspected(GuardTrip trip);
  const GuardTrip& trip() const noexcept { return trip_; }

 private:
  GuardTrip trip_;
};

/// Largest step allowed on `grid`: T_valid / 100.
double max_time_step(const Grid& grid) noexcept;
/// min(T_valid / 100, 0.5 / k_max^2).
double default_time_step(const Grid& grid) noexcept;

/// Number of steps t_end / dt. Throws std::invalid_argument when dt <= 0,
/// dt > T_valid/100, t_end < 0, the stride is < 1, or t_end is not a whole
/// number of strides (relative 1e-9).
long long validate(const SolverConfig& cfg, const Grid& grid);

/// P(|f|^2) f in the physical representation, where P is the 2/3-rule
/// projection of the intensity (identity for Dealias::none). The solver
/// kicks with the same filtered intensity, so this is exactly the forcing
/// term the discrete flow integrates.
Field nonlinearity(const Field& f, Dealias dealias = Dealias::two_thirds);

/// One Strang step: half kick exp(-i P(|u|^2) dt/2), exact free flow over
/// dt, half kick. Returns the physical representation. Throws
/// BlowupSuspected (carrying t_now + dt) when the result's grid sup norm
/// exceeds `guard`.
Field strang_step(const Field& f, double dt, Dealias dealias = Dealias::two_thirds,
                  double guard = std::numeric_limits<double>::infinity(), double t_now = 0.0);

/// Reusable workspace for repeated Strang steps on one grid.
class Stepper {
 public:
  Stepper(const Grid& grid, double dt, Dealias dealias);

  /// Advances physical values in place by one step.
  void step(std::span<Complex> u);
  /// Applies exp(-i P(|u|^2) h) in place.
  void kick(std::span<Complex> u, double h);
  /// Writes P(|u|^2) into `out` (size n^dim).
  void filtered_intensity(std::span<const Complex> u, std::span<double> out);

 private:
  Grid grid_;
  double dt_;
  Dealias dealias_;
  ComplexBuffer propagator_;
  ComplexBuffer work_;
  RealBuffer intensity_;
  ComplexBuffer intensity_hat_;
  std::vector<unsigned char> keep_;
};

/// Called with (t, physical state) at t = 0 and every snapshot_stride steps.
using SnapshotObserver = std::function<void(double, const Field&)>;

/// Runs the solver, reporting snapshots to `observer`. Returns the guard
/// trip if the run stopped early; the offending state is reported to the
/// observer before returning.
std::optional<GuardTrip> evolve_streaming(const Field& u0, const SolverConfig& cfg,
                                          const SnapshotObserver& observer);

/// Stores every snapshot. On a guard trip the partial trajectory is returned
/// with guard_trip set.
Trajectory evolve(const Field& u0, const SolverConfig& cfg, std::string provenance = {},
                  std::uint64_t seed = 0);

/// u0 -> lambda u0(lambda x) on the box of length L / lambda (same N), so
/// lattice samples map onto each other. Throws std::invalid_argument unless
/// lambda is an integer power of two.
Field rescale_initial_data(const Field& u0, double lambda);

}  // namespace cnls
