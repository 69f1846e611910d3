#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "cnls/field.hpp"
#include "cnls/trajectory.hpp"

namespace cnls {

/// Time integrals of the nonlinear forcing along a stored trajectory.
///
/// In the interaction picture G(tau) = exp(+i|k|^2 tau) F_hat(u(tau)) is
/// smooth in tau, and
///   -i int_a^b e^{i(t - tau)Laplacian} F(u(tau)) dtau = -i e^{-i|k|^2 t} int_a^b G.
/// The integral of G is taken exactly for its piecewise-linear interpolant
/// through the snapshot nodes (composite trapezoid; interval ends between
/// nodes are interpolated), so integrals over adjacent intervals add up
/// exactly. G at each node is computed once and cached.
class DuhamelIntegrator {
 public:
  explicit DuhamelIntegrator(const Trajectory& traj);

  const Trajectory& trajectory() const noexcept { return traj_; }

  /// int_a^b G(tau) dtau as Fourier coefficients. Throws
  /// std::invalid_argument if [a, b] is not covered by snapshots.
  Field interaction_integral(double a, double b);
  /// -i int_a^b e^{i(t_eval - tau)Laplacian} F(u(tau)) dtau, physical.
  Field integral(double a, double b, double t_eval);
  /// Number of snapshot nodes in [a, b].
  std::size_t nodes_in(double a, double b) const;

 private:
  const Field& node(std::size_t i);

  const Trajectory& traj_;
  std::vector<std::optional<Field>> cache_;
};

/// Interaction-picture integrand G(tau) for the state u at time tau.
Field interaction_integrand(const Field& u, double tau, Dealias dealias);

/// -i e^{-i|k|^2 t_eval} * (interaction-picture integral), physical.
Field from_interaction(const Field& integral, double t_eval);

Field duhamel_integral(const Trajectory& traj, double t_lo, double t_hi, double t_eval);

/// Free evolution of the initial snapshot to time t.
Field linear_part(const Trajectory& traj, double t);

struct DuhamelSplit {
  double t = 0.0;
  double delta = 0.0;
  Field u_l;
  Field v;
  Field w;
  /// ||u(t) - u_l - v - w||_{L^2} / ||u(t)||_{L^2} (absolute when u(t) = 0).
  double residual = 0.0;
  std::size_t quadrature_points = 0;
};

/// v = Duhamel over [0, (1-delta)t], w = Duhamel over [(1-delta)t, t], both
/// evaluated at t. Requires 0 < delta < 1 and t a snapshot time.
DuhamelSplit split_v_w(DuhamelIntegrator& integrator, double t, double delta);
DuhamelSplit split_v_w(const Trajectory& traj, double t, double delta);

/// Free continuation of u_l + v from the split time:
/// tilde_v(t) = e^{i(t - t_s)Laplacian}(u_l(t_s) + v(t_s)). Throws for t < t_s.
Field tilde_v(const DuhamelSplit& split, double t);

/// u(t) - tilde_v(t); t must be a snapshot time.
Field w_global(const Trajectory& traj, double t, const Field& tv);

/// Energy of w, the four pairings with tilde_v, and the modified energy
///   modE = E - corr1 - corr2 - corr3 - corr4,
///   corr1 = Re int |w|^2 w conj(tv),   corr2 = int |tv|^2 |w|^2,
///   corr3 = 1/2 Re int w^2 conj(tv)^2, corr4 = Re int w conj(|tv|^2 tv).
struct EnergyLedger {
  double t = 0.0;
  double E = 0.0;
  std::array<double, 4> corrections{};
  double modified_E = 0.0;
  double dmodE_dt = 0.0;
  double residual = 0.0;
};

EnergyLedger modified_energy(const Field& w, const Field& tv);

/// Fills dmodE_dt by second-order finite differences on the (possibly
/// nonuniform) sample times: centered in the interior, one-sided at the ends.
void differentiate_ledger(std::span<EnergyLedger> ledgers);

/// Ledger at each sample time (snapshot times in [1, t_end]); tilde_v is
/// anchored at t = 1. The residual column is the relative Duhamel identity
/// residual ||u - u_l - duhamel(0,t,t)|| / ||u|| at that time.
std::vector<EnergyLedger> ledger_series(const Trajectory& traj, double delta,
                                        std::span<const double> sample_times);

/// Builds the same ledger while the solver runs, without storing the
/// trajectory. Feed it every snapshot in order.
class LedgerBuilder {
 public:
  /// `sample_times` must be snapshot times >= 1; 1 itself must be a snapshot.
  LedgerBuilder(double delta, Dealias dealias, std::vector<double> sample_times);

  void observe(double t, const Field& u);
  /// Ledgers collected so far, with derivatives filled in.
  std::vector<EnergyLedger> finish() const;

 private:
  void add_segment(double t, const Field& g);

  double delta_;
  Dealias dealias_;
  std::vector<double> samples_;
  std::size_t next_sample_ = 0;
  std::optional<Field> u0_hat_;
  std::optional<Field> prev_g_;
  double prev_t_ = 0.0;
  std::optional<Field> acc_full_;
  std::optional<Field> acc_v_;
  std::optional<Field> tv1_;
  std::vector<EnergyLedger> ledgers_;
};

/// Smallest c with |modE - E| <= c (E^{3/4} + E^{1/4}) on every sample
/// (0 when every E vanishes).
double envelope_constant(std::span<const EnergyLedger> ledgers);

/// Every `factor`-th snapshot (the first and last are always kept when the
/// count allows it). Throws unless (size - 1) is a multiple of factor.
Trajectory subsample(const Trajectory& traj, int factor);

/// CSV: t,E,corr1,corr2,corr3,corr4,modE,dmodE_dt,residual after a
/// "# config_hash=<hex>" comment line.
void write_ledger_csv(std::ostream& os, std::span<const EnergyLedger> ledgers,
                      std::uint64_t config_hash);
std::vector<EnergyLedger> read_ledger_csv(std::istream& is);

}  // namespace cnls
