#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cnls/field.hpp"
#include "cnls/trajectory.hpp"

namespace cnls {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// (sum |f|^p h^dim)^{1/p}; p = kInf takes the max over the 2x upsampled
/// grid. Throws std::invalid_argument for p < 1.
double lp_norm(const Field& f, double p);
/// || |grad|^s f ||_{L^p}.
double sobolev_norm(const Field& f, double s, double p);
/// Integral of |f|^2, evaluated spectrally.
double mass(const Field& f);
/// 1/2 int |grad f|^2 + 1/4 int |f|^4, gradient term evaluated spectrally.
double energy(const Field& f);
/// Kinetic part 1/2 int |grad f|^2.
double kinetic_energy(const Field& f);

/// Composite trapezoid rule for a sampled scalar g(t) over [t_lo, t_hi];
/// ends that fall between samples are linearly interpolated.
double trapezoid_integral(std::span<const double> times, std::span<const double> values,
                          double t_lo, double t_hi);

/// (int_{t_lo}^{t_hi} n(t)^q dt)^{1/q} for sampled n(t) >= 0; q = kInf is the
/// max over samples inside the interval (a lower bound on the sup).
double time_norm(std::span<const double> times, std::span<const double> values, double q,
                 double t_lo, double t_hi);

/// L^q_t L^r_x norm of a trajectory on [t_lo, t_hi].
double spacetime_norm(const Trajectory& traj, double q, double r, double t_lo, double t_hi);

struct MorawetzRecord {
  double lhs = 0.0;
  double rhs = 0.0;
};

/// lhs = ||u||_{L^4_{t,x}}^4, rhs = sup_t mass * (sup_t ||u||_{H^{1/2}})^2.
MorawetzRecord morawetz_check(const Trajectory& traj, double t_lo, double t_hi);
/// lhs = ||u||_{L^8_t L^4_x}^4, rhs = (sup_t mass)^{3/4} (sup_t energy)^{3/4}.
MorawetzRecord morawetz_interpolated(const Trajectory& traj, double t_lo, double t_hi);

enum class NormKind : std::uint8_t { lebesgue, sobolev, spacetime, mass, energy };

struct NormDescriptor {
  NormKind kind = NormKind::lebesgue;
  double s = 0.0;
  double p = 2.0;
  double q = 2.0;
  double r = 2.0;

  static NormDescriptor lebesgue(double p);
  static NormDescriptor sobolev(double s, double p);
  static NormDescriptor spacetime(double q, double r);
  static NormDescriptor mass_functional();
  static NormDescriptor energy_functional();

  /// Throws std::invalid_argument if an exponent used by `kind` is outside
  /// [1, inf] or s < 0.
  void validate() const;
  /// Evaluates a spatial descriptor on one field (spacetime is rejected).
  double evaluate(const Field& f) const;
  std::string label() const;

  friend bool operator==(const NormDescriptor&, const NormDescriptor&) = default;
};

std::string to_string(NormKind kind);
NormKind norm_kind_from_string(const std::string& name);

/// Time series of one norm functional.
class NormSeries {
 public:
  NormSeries() = default;
  explicit NormSeries(NormDescriptor d);

  /// Appends (t, value); throws std::invalid_argument unless t exceeds the
  /// last time and value is finite and non-negative.
  void append(double t, double value);

  const NormDescriptor& descriptor() const noexcept { return descriptor_; }
  const std::vector<double>& times() const noexcept { return times_; }
  const std::vector<double>& values() const noexcept { return values_; }
  std::size_t size() const noexcept { return times_.size(); }
  bool empty() const noexcept { return times_.empty(); }

 private:
  NormDescriptor descriptor_;
  std::vector<double> times_;
  std::vector<double> values_;
};

/// Evaluates a spatial descriptor at every snapshot of a trajectory.
NormSeries measure_series(const Trajectory& traj, const NormDescriptor& d);

/// CSV with header t,value,kind,s,p,q,r preceded by "# config_hash=<hex>".
/// Exponents not used by the kind are left empty.
void write_norm_series_csv(std::ostream& os, const NormSeries& series, std::uint64_t config_hash);
/// Parses write_norm_series_csv output; comment lines are skipped. Throws
/// std::runtime_error naming the line of a malformed row.
NormSeries read_norm_series_csv(std::istream& is);

}  // namespace cnls
