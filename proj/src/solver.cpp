#include "cnls/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cnls/spectral.hpp"

namespace cnls {

BlowupSuspected::BlowupSuspected(GuardTrip trip)
    : std::runtime_error("amplitude guard exceeded at t=" + std::to_string(trip.t) +
                         " (sup norm " + std::to_string(trip.sup_norm) + ")"),
      trip_(trip) {}

double max_time_step(const Grid& grid) noexcept { return grid.t_valid() / 100.0; }

double default_time_step(const Grid& grid) noexcept {
  return std::min(max_time_step(grid), 0.5 / (grid.k_max() * grid.k_max()));
}

long long validate(const SolverConfig& cfg, const Grid& grid) {
  if (!(cfg.dt > 0.0) || !std::isfinite(cfg.dt)) throw std::invalid_argument("dt must be positive");
  if (cfg.dt > max_time_step(grid) * (1.0 + 1e-12)) {
    throw std::invalid_argument("dt=" + std::to_string(cfg.dt) + " exceeds T_valid/100=" +
                                std::to_string(max_time_step(grid)));
  }
  if (!(cfg.t_end >= 0.0) || !std::isfinite(cfg.t_end)) throw std::invalid_argument("t_end must be >= 0");
  if (cfg.snapshot_stride < 1) throw std::invalid_argument("snapshot_stride must be >= 1");
  if (!(cfg.amplitude_guard >= 0.0)) throw std::invalid_argument("amplitude_guard must be >= 0");
  const double steps = cfg.t_end / cfg.dt;
  const auto n = std::llround(steps);
  if (std::abs(steps - static_cast<double>(n)) > 1e-9 * std::max(1.0, steps)) {
    throw std::invalid_argument("t_end is not a whole number of steps");
  }
  if (n % cfg.snapshot_stride != 0) {
    throw std::invalid_argument("t_end is not a whole number of snapshot strides");
  }
  return n;
}

namespace {

double grid_sup(std::span<const Complex> u) {
  double m = 0.0;
  for (const auto& z : u) m = std::max(m, std::norm(z));
  return std::sqrt(m);
}

}  // namespace

Stepper::Stepper(const Grid& grid, double dt, Dealias dealias)
    : grid_(grid),
      dt_(dt),
      dealias_(dealias),
      propagator_(grid.size()),
      work_(grid.size()),
      intensity_(grid.size()),
      intensity_hat_(half_spectrum_size(grid.dim(), grid.n())) {
  for (std::size_t i = 0; i < grid.size(); ++i) {
    propagator_[i] = std::polar(1.0, -wavenumber_squared(grid, i) * dt);
  }
  // half-spectrum mask: keep modes with 3|m| < n on every axis
  const int n = grid.n();
  const int last = n / 2 + 1;
  keep_.assign(intensity_hat_.size(), 1);
  for (std::size_t i = 0; i < keep_.size(); ++i) {
    std::size_t rest = i;
    bool keep = true;
    const int m_last = static_cast<int>(rest % static_cast<std::size_t>(last));
    rest /= static_cast<std::size_t>(last);
    keep = 3 * m_last < n;
    for (int a = grid.dim() - 2; a >= 0; --a) {
      const int idx = static_cast<int>(rest % static_cast<std::size_t>(n));
      rest /= static_cast<std::size_t>(n);
      keep = keep && 3 * std::abs(grid.mode(idx)) < n;
    }
    keep_[i] = keep ? 1 : 0;
  }
}

void Stepper::filtered_intensity(std::span<const Complex> u, std::span<double> out) {
  for (std::size_t i = 0; i < u.size(); ++i) out[i] = std::norm(u[i]);
  if (dealias_ == Dealias::none) return;
  rfft(out, intensity_hat_, grid_.dim(), grid_.n());
  for (std::size_t i = 0; i < keep_.size(); ++i) {
    if (!keep_[i]) intensity_hat_[i] = 0.0;
  }
  irfft(intensity_hat_, out, grid_.dim(), grid_.n());
}

void Stepper::kick(std::span<Complex> u, double h) {
  filtered_intensity(u, intensity_);
  for (std::size_t i = 0; i < u.size(); ++i) u[i] *= std::polar(1.0, -intensity_[i] * h);
}

void Stepper::step(std::span<Complex> u) {
  kick(u, 0.5 * dt_);
  fft_inplace(u, grid_.dim(), grid_.n(), Direction::forward);
  for (std::size_t i = 0; i < u.size(); ++i) u[i] *= propagator_[i];
  fft_inplace(u, grid_.dim(), grid_.n(), Direction::backward);
  kick(u, 0.5 * dt_);
}

Field nonlinearity(const Field& f, Dealias dealias) {
  Field u = f.to_physical();
  Stepper s(f.grid(), 0.0, dealias);
  RealBuffer intensity(u.size());
  s.filtered_intensity(u.values(), intensity);
  auto vals = u.values();
  for (std::size_t i = 0; i < vals.size(); ++i) vals[i] *= intensity[i];
  return u;
}

Field strang_step(const Field& f, double dt, Dealias dealias, double guard, double t_now) {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  Field u = f.to_physical();
  Stepper s(f.grid(), dt, dealias);
  s.step(u.values());
  const double sup = grid_sup(u.values());
  if (!(sup <= guard)) throw BlowupSuspected({t_now + dt, sup});
  return u;
}

std::optional<GuardTrip> evolve_streaming(const Field& u0, const SolverConfig& cfg,
                                          const SnapshotObserver& observer) {
  const Grid& grid = u0.grid();
  const long long steps = validate(cfg, grid);
  if (!u0.is_finite()) throw std::invalid_argument("initial data is not finite");
  Field u = u0.to_physical();
  double guard = cfg.amplitude_guard;
  if (guard == 0.0) {
    const double sup0 = max_modulus_upsampled(u);
    guard = sup0 > 0.0 ? 1e4 * sup0 : std::numeric_limits<double>::infinity();
  }
  Stepper stepper(grid, cfg.dt, cfg.dealias);
  observer(0.0, u);
  for (long long n = 1; n <= steps; ++n) {
    stepper.step(u.values());
    const double t = static_cast<double>(n) * cfg.dt;
    const double sup = grid_sup(u.values());
    if (!(sup <= guard)) {
      observer(t, u);
      return GuardTrip{t, sup};
    }
    if (n % cfg.snapshot_stride == 0) observer(t, u);
  }
  return std::nullopt;
}

Trajectory evolve(const Field& u0, const SolverConfig& cfg, std::string provenance, std::uint64_t seed) {
  Trajectory traj;
  traj.grid = u0.grid();
  traj.config = cfg;
  traj.provenance = std::move(provenance);
  traj.seed = seed;
  traj.guard_trip = evolve_streaming(u0, cfg, [&](double t, const Field& u) {
    traj.times.push_back(t);
    traj.snapshots.push_back(u);
  });
  return traj;
}

Field rescale_initial_data(const Field& u0, double lambda) {
  int e = 0;
  const double mant = std::frexp(lambda, &e);
  if (!(lambda > 0.0) || mant != 0.5) {
    throw std::invalid_argument("rescaling factor must be an integer power of two");
  }
  const Grid& g = u0.grid();
  const Grid scaled = Grid::make(g.dim(), g.n(), g.box_length() / lambda);
  Field x = u0.to_physical();
  ComplexBuffer vals(x.values().begin(), x.values().end());
  for (auto& z : vals) z *= lambda;
  return Field(scaled, std::move(vals), Representation::physical);
}

}  // namespace cnls
