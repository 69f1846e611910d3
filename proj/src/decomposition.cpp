#include "cnls/decomposition.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <stdexcept>

#include "cnls/csv.hpp"
#include "cnls/norms.hpp"
#include "cnls/solver.hpp"
#include "cnls/spectral.hpp"

namespace cnls {
namespace {

constexpr Complex kMinusI{0.0, -1.0};

bool same_time(double a, double b) { return std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(b)); }

void axpy(Field& acc, Complex c, const Field& x) {
  auto a = acc.values();
  const auto v = x.values();
  for (std::size_t i = 0; i < a.size(); ++i) a[i] += c * v[i];
}

double relative_l2(const Field& diff, const Field& ref) {
  const double r = lp_norm(ref, 2.0);
  const double d = lp_norm(diff, 2.0);
  return r > 0.0 ? d / r : d;
}

std::size_t require_snapshot(const Trajectory& traj, double t) {
  const auto idx = traj.index_of(t);
  if (!idx) throw std::invalid_argument("t=" + std::to_string(t) + " is not a snapshot time");
  return *idx;
}

}  // namespace

Field interaction_integrand(const Field& u, double tau, Dealias dealias) {
  Field g = nonlinearity(u, dealias);
  g.convert(Representation::fourier);
  auto vals = g.values();
  for (std::size_t i = 0; i < vals.size(); ++i) {
    vals[i] *= std::polar(1.0, wavenumber_squared(g.grid(), i) * tau);
  }
  return g;
}

Field from_interaction(const Field& integral, double t_eval) {
  Field out = integral.to_fourier();
  auto vals = out.values();
  for (std::size_t i = 0; i < vals.size(); ++i) {
    vals[i] *= kMinusI * std::polar(1.0, -wavenumber_squared(out.grid(), i) * t_eval);
  }
  out.convert(Representation::physical);
  return out;
}

DuhamelIntegrator::DuhamelIntegrator(const Trajectory& traj) : traj_(traj), cache_(traj.size()) {}

const Field& DuhamelIntegrator::node(std::size_t i) {
  if (!cache_[i]) cache_[i] = interaction_integrand(traj_.snapshots[i], traj_.times[i], traj_.config.dealias);
  return *cache_[i];
}

Field DuhamelIntegrator::interaction_integral(double a, double b) {
  traj_.require_covers(a, b);
  Field acc(traj_.grid, Representation::fourier);
  if (a == b) return acc;
  const auto& ts = traj_.times;
  std::vector<double> coeff(ts.size(), 0.0);
  for (std::size_t i = 0; i + 1 < ts.size(); ++i) {
    const double lo = std::max(ts[i], a);
    const double hi = std::min(ts[i + 1], b);
    if (!(hi > lo)) continue;
    const double h = ts[i + 1] - ts[i];
    const double wl = (lo - ts[i]) / h;
    const double wh = (hi - ts[i]) / h;
    coeff[i] += 0.5 * (hi - lo) * (2.0 - wl - wh);
    coeff[i + 1] += 0.5 * (hi - lo) * (wl + wh);
  }
  for (std::size_t i = 0; i < ts.size(); ++i) {
    if (coeff[i] != 0.0) axpy(acc, coeff[i], node(i));
  }
  return acc;
}

Field DuhamelIntegrator::integral(double a, double b, double t_eval) {
  return from_interaction(interaction_integral(a, b), t_eval);
}

std::size_t DuhamelIntegrator::nodes_in(double a, double b) const {
  return static_cast<std::size_t>(std::count_if(traj_.times.begin(), traj_.times.end(), [&](double t) {
    return t >= a - 1e-12 && t <= b + 1e-12;
  }));
}

Field duhamel_integral(const Trajectory& traj, double t_lo, double t_hi, double t_eval) {
  DuhamelIntegrator integ(traj);
  return integ.integral(t_lo, t_hi, t_eval);
}

Field linear_part(const Trajectory& traj, double t) {
  if (traj.empty()) throw std::invalid_argument("trajectory is empty");
  return free_propagate(traj.snapshots.front().to_fourier(), t - traj.times.front()).to_physical();
}

DuhamelSplit split_v_w(DuhamelIntegrator& integrator, double t, double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must lie in (0, 1)");
  const Trajectory& traj = integrator.trajectory();
  const std::size_t idx = require_snapshot(traj, t);
  t = traj.times[idx];
  const double t0 = traj.times.front();
  const double cut = t0 + (1.0 - delta) * (t - t0);
  Field u_l = linear_part(traj, t);
  Field v = integrator.integral(t0, cut, t);
  Field w = integrator.integral(cut, t, t);
  const Field& u = traj.snapshots[idx];
  const double residual = relative_l2(u - u_l - v - w, u);
  return DuhamelSplit{t, delta, std::move(u_l), std::move(v), std::move(w), residual,
                      integrator.nodes_in(t0, t)};
}

DuhamelSplit split_v_w(const Trajectory& traj, double t, double delta) {
  DuhamelIntegrator integ(traj);
  return split_v_w(integ, t, delta);
}

Field tilde_v(const DuhamelSplit& split, double t) {
  if (t < split.t - 1e-12 * std::max(1.0, split.t)) {
    throw std::invalid_argument("tilde_v is defined only for t >= the split time");
  }
  return free_propagate(split.u_l + split.v, t - split.t).to_physical();
}

Field w_global(const Trajectory& traj, double t, const Field& tv) {
  return traj.snapshots[require_snapshot(traj, t)] - tv;
}

EnergyLedger modified_energy(const Field& w, const Field& tv) {
  if (!(w.grid() == tv.grid())) throw std::invalid_argument("w and tilde_v live on different grids");
  const Field wx = w.to_physical();
  const Field vx = tv.to_physical();
  const auto a = wx.values();
  const auto b = vx.values();
  double c1 = 0.0, c2 = 0.0, c3 = 0.0, c4 = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double aw = std::norm(a[i]);
    const double av = std::norm(b[i]);
    const Complex wv = a[i] * std::conj(b[i]);
    c1 += aw * wv.real();
    c2 += av * aw;
    c3 += 0.5 * (wv * wv).real();
    c4 += av * wv.real();
  }
  const double h = w.grid().cell_volume();
  EnergyLedger out;
  out.E = energy(wx);
  out.corrections = {c1 * h, c2 * h, c3 * h, c4 * h};
  out.modified_E = out.E - out.corrections[0] - out.corrections[1] - out.corrections[2] -
                   out.corrections[3];
  return out;
}

void differentiate_ledger(std::span<EnergyLedger> l) {
  const std::size_t n = l.size();
  if (n == 0) return;
  if (n == 1) {
    l[0].dmodE_dt = 0.0;
    return;
  }
  if (n == 2) {
    const double d = (l[1].modified_E - l[0].modified_E) / (l[1].t - l[0].t);
    l[0].dmodE_dt = l[1].dmodE_dt = d;
    return;
  }
  const auto f = [&](std::size_t i) { return l[i].modified_E; };
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double h1 = l[i].t - l[i - 1].t;
    const double h2 = l[i + 1].t - l[i].t;
    l[i].dmodE_dt = -h2 / (h1 * (h1 + h2)) * f(i - 1) + (h2 - h1) / (h1 * h2) * f(i) +
                    h1 / (h2 * (h1 + h2)) * f(i + 1);
  }
  {
    const double h1 = l[1].t - l[0].t;
    const double h2 = l[2].t - l[1].t;
    l[0].dmodE_dt = -(2.0 * h1 + h2) / (h1 * (h1 + h2)) * f(0) + (h1 + h2) / (h1 * h2) * f(1) -
                    h1 / (h2 * (h1 + h2)) * f(2);
  }
  {
    const double a = l[n - 1].t - l[n - 2].t;
    const double b = l[n - 2].t - l[n - 3].t;
    l[n - 1].dmodE_dt = (2.0 * a + b) / (a * (a + b)) * f(n - 1) - (a + b) / (a * b) * f(n - 2) +
                        a / (b * (a + b)) * f(n - 3);
  }
}

std::vector<EnergyLedger> ledger_series(const Trajectory& traj, double delta,
                                        std::span<const double> sample_times) {
  if (!std::is_sorted(sample_times.begin(), sample_times.end())) {
    throw std::invalid_argument("sample times must be increasing");
  }
  DuhamelIntegrator integ(traj);
  const DuhamelSplit anchor = split_v_w(integ, 1.0, delta);
  const Field tv1 = anchor.u_l + anchor.v;
  const Field u0_hat = traj.snapshots.front().to_fourier();
  Field running(traj.grid, Representation::fourier);
  double running_t = traj.times.front();
  std::vector<EnergyLedger> out;
  for (double t : sample_times) {
    if (t < 1.0 - 1e-12) throw std::invalid_argument("ledger sample times must be >= 1");
    const std::size_t idx = require_snapshot(traj, t);
    t = traj.times[idx];
    const Field tv = free_propagate(tv1, t - 1.0).to_physical();
    const Field& u = traj.snapshots[idx];
    EnergyLedger led = modified_energy(u - tv, tv);
    led.t = t;
    running += integ.interaction_integral(running_t, t);
    running_t = t;
    const Field resid = u - free_propagate(u0_hat, t).to_physical() - from_interaction(running, t);
    led.residual = relative_l2(resid, u);
    out.push_back(led);
  }
  differentiate_ledger(out);
  return out;
}

LedgerBuilder::LedgerBuilder(double delta, Dealias dealias, std::vector<double> sample_times)
    : delta_(delta), dealias_(dealias), samples_(std::move(sample_times)) {
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must lie in (0, 1)");
  if (!std::is_sorted(samples_.begin(), samples_.end())) {
    throw std::invalid_argument("sample times must be increasing");
  }
  if (!samples_.empty() && samples_.front() < 1.0 - 1e-12) {
    throw std::invalid_argument("ledger sample times must be >= 1");
  }
}

void LedgerBuilder::add_segment(double t, const Field& g) {
  const double h = t - prev_t_;
  axpy(*acc_full_, 0.5 * h, *prev_g_);
  axpy(*acc_full_, 0.5 * h, g);
  const double cut = 1.0 - delta_;
  if (t <= cut) {
    axpy(*acc_v_, 0.5 * h, *prev_g_);
    axpy(*acc_v_, 0.5 * h, g);
  } else if (prev_t_ < cut) {
    const double len = cut - prev_t_;
    const double wh = len / h;
    axpy(*acc_v_, 0.5 * len * (2.0 - wh), *prev_g_);
    axpy(*acc_v_, 0.5 * len * wh, g);
  }
}

void LedgerBuilder::observe(double t, const Field& u) {
  Field g = interaction_integrand(u, t, dealias_);
  if (!u0_hat_) {
    if (t != 0.0) throw std::invalid_argument("the first observed snapshot must be at t = 0");
    u0_hat_ = u.to_fourier();
    acc_full_ = Field(u.grid(), Representation::fourier);
    acc_v_ = Field(u.grid(), Representation::fourier);
  } else {
    if (!(t > prev_t_)) throw std::invalid_argument("snapshots must arrive in time order");
    add_segment(t, g);
  }
  prev_g_ = std::move(g);
  prev_t_ = t;

  if (!tv1_ && same_time(t, 1.0)) {
    tv1_ = free_propagate(*u0_hat_, 1.0) + from_interaction(*acc_v_, 1.0);
  } else if (!tv1_ && t > 1.0) {
    throw std::invalid_argument("t = 1 is not a snapshot time");
  }
  if (next_sample_ < samples_.size() && t > samples_[next_sample_] &&
      !same_time(t, samples_[next_sample_])) {
    throw std::invalid_argument("sample time " + std::to_string(samples_[next_sample_]) +
                                " is not a snapshot time");
  }
  if (next_sample_ < samples_.size() && same_time(t, samples_[next_sample_])) {
    ++next_sample_;
    const Field tv = free_propagate(*tv1_, t - 1.0).to_physical();
    const Field ux = u.to_physical();
    EnergyLedger led = modified_energy(ux - tv, tv);
    led.t = t;
    const Field resid = ux - free_propagate(*u0_hat_, t).to_physical() - from_interaction(*acc_full_, t);
    led.residual = relative_l2(resid, ux);
    ledgers_.push_back(led);
  }
}

std::vector<EnergyLedger> LedgerBuilder::finish() const {
  std::vector<EnergyLedger> out = ledgers_;
  differentiate_ledger(out);
  return out;
}

double envelope_constant(std::span<const EnergyLedger> ledgers) {
  double c = 0.0;
  for (const auto& l : ledgers) {
    const double gap = std::abs(l.modified_E - l.E);
    if (l.E > 0.0) {
      c = std::max(c, gap / (std::pow(l.E, 0.75) + std::pow(l.E, 0.25)));
    } else if (gap > 0.0) {
      return std::numeric_limits<double>::infinity();
    }
  }
  return c;
}

Trajectory subsample(const Trajectory& traj, int factor) {
  if (factor < 1) throw std::invalid_argument("subsampling factor must be >= 1");
  if (traj.empty() || (traj.size() - 1) % static_cast<std::size_t>(factor) != 0) {
    throw std::invalid_argument("snapshot count does not divide into the subsampling factor");
  }
  Trajectory out;
  out.grid = traj.grid;
  out.config = traj.config;
  out.config.snapshot_stride *= factor;
  out.provenance = traj.provenance;
  out.seed = traj.seed;
  out.guard_trip = traj.guard_trip;
  for (std::size_t i = 0; i < traj.size(); i += static_cast<std::size_t>(factor)) {
    out.times.push_back(traj.times[i]);
    out.snapshots.push_back(traj.snapshots[i]);
  }
  return out;
}

void write_ledger_csv(std::ostream& os, std::span<const EnergyLedger> ledgers, std::uint64_t config_hash) {
  using csv::format_number;
  os << "# config_hash=" << csv::format_hash(config_hash) << "\n";
  os << "t,E,corr1,corr2,corr3,corr4,modE,dmodE_dt,residual\n";
  for (const auto& l : ledgers) {
    os << format_number(l.t) << "," << format_number(l.E);
    for (double c : l.corrections) os << "," << format_number(c);
    os << "," << format_number(l.modified_E) << "," << format_number(l.dmodE_dt) << ","
       << format_number(l.residual) << "\n";
  }
}

std::vector<EnergyLedger> read_ledger_csv(std::istream& is) {
  std::vector<EnergyLedger> out;
  std::string line;
  std::size_t lineno = 0;
  bool header = false;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    if (!header) {
      if (line != "t,E,corr1,corr2,corr3,corr4,modE,dmodE_dt,residual") {
        throw std::runtime_error("line " + std::to_string(lineno) + ": unexpected header");
      }
      header = true;
      continue;
    }
    try {
      const auto c = csv::split(line);
      if (c.size() != 9) throw std::invalid_argument("expected 9 columns");
      EnergyLedger l;
      l.t = csv::parse_number(c[0]);
      l.E = csv::parse_number(c[1]);
      for (int k = 0; k < 4; ++k) l.corrections[k] = csv::parse_number(c[2 + k]);
      l.modified_E = csv::parse_number(c[6]);
      l.dmodE_dt = csv::parse_number(c[7]);
      l.residual = csv::parse_number(c[8]);
      out.push_back(l);
    } catch (const std::invalid_argument& e) {
      throw std::runtime_error("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  if (!header) throw std::runtime_error("missing header row");
  return out;
}

}  // namespace cnls
