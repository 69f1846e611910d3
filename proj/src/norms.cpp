#include "cnls/norms.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <stdexcept>

#include "cnls/csv.hpp"
#include "cnls/spectral.hpp"

namespace cnls {
namespace {

void require_exponent(double p, const char* what) {
  if (!(p >= 1.0)) throw std::invalid_argument(std::string(what) + " exponent must lie in [1, inf]");
}

double fourier_weighted_sum(const Field& f, double power_of_k2) {
  const Field fh = f.to_fourier();
  const auto vals = fh.values();
  const Grid& g = f.grid();
  double acc = 0.0;
  for (std::size_t i = 0; i < vals.size(); ++i) {
    const double w = power_of_k2 == 0.0 ? 1.0 : std::pow(wavenumber_squared(g, i), power_of_k2);
    acc += w * std::norm(vals[i]);
  }
  // Parseval: int |f|^2 = L^d / N^{2d} sum |f_hat|^2
  return acc * g.volume() / (static_cast<double>(g.size()) * static_cast<double>(g.size()));
}

}  // namespace

double lp_norm(const Field& f, double p) {
  require_exponent(p, "Lebesgue");
  if (std::isinf(p)) return max_modulus_upsampled(f);
  const Field x = f.to_physical();
  double acc = 0.0;
  if (p == 2.0) {
    for (const auto& z : x.values()) acc += std::norm(z);
    return std::sqrt(acc * f.grid().cell_volume());
  }
  for (const auto& z : x.values()) acc += std::pow(std::abs(z), p);
  return std::pow(acc * f.grid().cell_volume(), 1.0 / p);
}

double sobolev_norm(const Field& f, double s, double p) {
  require_exponent(p, "Sobolev");
  if (s == 0.0) return lp_norm(f, p);
  return lp_norm(fractional_derivative(f, s), p);
}

double mass(const Field& f) { return fourier_weighted_sum(f, 0.0); }

double kinetic_energy(const Field& f) { return 0.5 * fourier_weighted_sum(f, 1.0); }

double energy(const Field& f) {
  const Field x = f.to_physical();
  double quartic = 0.0;
  for (const auto& z : x.values()) {
    const double m2 = std::norm(z);
    quartic += m2 * m2;
  }
  return kinetic_energy(f) + 0.25 * quartic * f.grid().cell_volume();
}

double trapezoid_integral(std::span<const double> times, std::span<const double> values,
                          double t_lo, double t_hi) {
  if (times.size() != values.size()) throw std::invalid_argument("times and values differ in length");
  if (times.empty()) throw std::invalid_argument("no samples");
  const double scale = std::max(std::abs(times.back()), 1.0);
  if (t_lo < times.front() - 1e-12 * scale || t_hi > times.back() + 1e-12 * scale || t_lo > t_hi) {
    throw std::invalid_argument("integration interval not covered by samples");
  }
  t_lo = std::max(t_lo, times.front());
  t_hi = std::min(t_hi, times.back());
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < times.size(); ++i) {
    const double a = std::max(times[i], t_lo);
    const double b = std::min(times[i + 1], t_hi);
    if (b <= a) continue;
    const double span = times[i + 1] - times[i];
    const auto lerp = [&](double t) {
      const double w = (t - times[i]) / span;
      return (1.0 - w) * values[i] + w * values[i + 1];
    };
    acc += 0.5 * (b - a) * (lerp(a) + lerp(b));
  }
  return acc;
}

double time_norm(std::span<const double> times, std::span<const double> values, double q,
                 double t_lo, double t_hi) {
  require_exponent(q, "time");
  if (std::isinf(q)) {
    trapezoid_integral(times, values, t_lo, t_hi);  // coverage check
    double m = 0.0;
    for (std::size_t i = 0; i < times.size(); ++i) {
      if (times[i] >= t_lo - 1e-12 && times[i] <= t_hi + 1e-12) m = std::max(m, values[i]);
    }
    return m;
  }
  std::vector<double> powered(values.size());
  std::transform(values.begin(), values.end(), powered.begin(),
                 [q](double v) { return std::pow(v, q); });
  return std::pow(trapezoid_integral(times, powered, t_lo, t_hi), 1.0 / q);
}

namespace {

std::vector<double> series_in(const Trajectory& traj, double t_lo, double t_hi,
                              const auto& functional) {
  traj.require_covers(t_lo, t_hi);
  std::vector<double> out(traj.size(), 0.0);
  for (std::size_t i = 0; i < traj.size(); ++i) {
    // samples bracketing the interval are needed for interpolation
    const bool left_ok = i + 1 >= traj.size() || traj.times[i + 1] > t_lo;
    const bool right_ok = i == 0 || traj.times[i - 1] < t_hi;
    if (left_ok && right_ok) out[i] = functional(traj.snapshots[i]);
  }
  return out;
}

}  // namespace

double spacetime_norm(const Trajectory& traj, double q, double r, double t_lo, double t_hi) {
  require_exponent(q, "time");
  require_exponent(r, "space");
  const auto n = series_in(traj, t_lo, t_hi, [r](const Field& f) { return lp_norm(f, r); });
  return time_norm(traj.times, n, q, t_lo, t_hi);
}

MorawetzRecord morawetz_check(const Trajectory& traj, double t_lo, double t_hi) {
  const auto l4 = series_in(traj, t_lo, t_hi, [](const Field& f) { return lp_norm(f, 4.0); });
  const auto m = series_in(traj, t_lo, t_hi, [](const Field& f) { return mass(f); });
  const auto h = series_in(traj, t_lo, t_hi, [](const Field& f) { return sobolev_norm(f, 0.5, 2.0); });
  const double lhs = std::pow(time_norm(traj.times, l4, 4.0, t_lo, t_hi), 4.0);
  const double sup_h = time_norm(traj.times, h, kInf, t_lo, t_hi);
  return {lhs, time_norm(traj.times, m, kInf, t_lo, t_hi) * sup_h * sup_h};
}

MorawetzRecord morawetz_interpolated(const Trajectory& traj, double t_lo, double t_hi) {
  const auto l4 = series_in(traj, t_lo, t_hi, [](const Field& f) { return lp_norm(f, 4.0); });
  const auto m = series_in(traj, t_lo, t_hi, [](const Field& f) { return mass(f); });
  const auto e = series_in(traj, t_lo, t_hi, [](const Field& f) { return energy(f); });
  const double lhs = std::pow(time_norm(traj.times, l4, 8.0, t_lo, t_hi), 4.0);
  const double rhs = std::pow(time_norm(traj.times, m, kInf, t_lo, t_hi), 0.75) *
                     std::pow(time_norm(traj.times, e, kInf, t_lo, t_hi), 0.75);
  return {lhs, rhs};
}

NormDescriptor NormDescriptor::lebesgue(double p) {
  NormDescriptor d{NormKind::lebesgue, 0.0, p, 2.0, 2.0};
  d.validate();
  return d;
}

NormDescriptor NormDescriptor::sobolev(double s, double p) {
  NormDescriptor d{NormKind::sobolev, s, p, 2.0, 2.0};
  d.validate();
  return d;
}

NormDescriptor NormDescriptor::spacetime(double q, double r) {
  NormDescriptor d{NormKind::spacetime, 0.0, 2.0, q, r};
  d.validate();
  return d;
}

NormDescriptor NormDescriptor::mass_functional() { return {NormKind::mass, 0.0, 2.0, 2.0, 2.0}; }

NormDescriptor NormDescriptor::energy_functional() { return {NormKind::energy, 0.0, 2.0, 2.0, 2.0}; }

void NormDescriptor::validate() const {
  switch (kind) {
    case NormKind::sobolev:
      if (!(s >= 0.0)) throw std::invalid_argument("Sobolev order must be >= 0");
      [[fallthrough]];
    case NormKind::lebesgue:
      require_exponent(p, "Lebesgue");
      break;
    case NormKind::spacetime:
      require_exponent(q, "time");
      require_exponent(r, "space");
      break;
    case NormKind::mass:
    case NormKind::energy:
      break;
  }
}

double NormDescriptor::evaluate(const Field& f) const {
  switch (kind) {
    case NormKind::lebesgue: return lp_norm(f, p);
    case NormKind::sobolev: return sobolev_norm(f, s, p);
    case NormKind::mass: return mass(f);
    case NormKind::energy: return energy(f);
    case NormKind::spacetime: break;
  }
  throw std::invalid_argument("space-time norms are not defined on a single field");
}

std::string NormDescriptor::label() const {
  using csv::format_number;
  switch (kind) {
    case NormKind::lebesgue: return "L^" + format_number(p);
    case NormKind::sobolev: return "W^{" + format_number(s) + "," + format_number(p) + "}";
    case NormKind::spacetime: return "L^" + format_number(q) + "_t L^" + format_number(r) + "_x";
    case NormKind::mass: return "mass";
    case NormKind::energy: return "energy";
  }
  return "?";
}

std::string to_string(NormKind kind) {
  switch (kind) {
    case NormKind::lebesgue: return "lebesgue";
    case NormKind::sobolev: return "sobolev";
    case NormKind::spacetime: return "spacetime";
    case NormKind::mass: return "mass";
    case NormKind::energy: return "energy";
  }
  return "?";
}

NormKind norm_kind_from_string(const std::string& name) {
  for (auto k : {NormKind::lebesgue, NormKind::sobolev, NormKind::spacetime, NormKind::mass,
                 NormKind::energy}) {
    if (to_string(k) == name) return k;
  }
  throw std::invalid_argument("unknown norm kind '" + name + "'");
}

NormSeries::NormSeries(NormDescriptor d) : descriptor_(d) { descriptor_.validate(); }

void NormSeries::append(double t, double value) {
  if (!std::isfinite(t)) throw std::invalid_argument("sample time must be finite");
  if (!times_.empty() && !(t > times_.back())) {
    throw std::invalid_argument("sample times must be strictly increasing");
  }
  if (!std::isfinite(value) || value < 0.0) {
    throw std::invalid_argument("norm values must be finite and non-negative");
  }
  times_.push_back(t);
  values_.push_back(value);
}

NormSeries measure_series(const Trajectory& traj, const NormDescriptor& d) {
  NormSeries out(d);
  for (std::size_t i = 0; i < traj.size(); ++i) out.append(traj.times[i], d.evaluate(traj.snapshots[i]));
  return out;
}

void write_norm_series_csv(std::ostream& os, const NormSeries& series, std::uint64_t config_hash) {
  using csv::format_number;
  const auto& d = series.descriptor();
  const bool uses_s = d.kind == NormKind::sobolev;
  const bool uses_p = d.kind == NormKind::lebesgue || d.kind == NormKind::sobolev;
  const bool uses_qr = d.kind == NormKind::spacetime;
  const std::string tail = "," + to_string(d.kind) + "," + (uses_s ? format_number(d.s) : "") + "," +
                           (uses_p ? format_number(d.p) : "") + "," +
                           (uses_qr ? format_number(d.q) : "") + "," +
                           (uses_qr ? format_number(d.r) : "");
  os << "# config_hash=" << csv::format_hash(config_hash) << "\n";
  os << "t,value,kind,s,p,q,r\n";
  for (std::size_t i = 0; i < series.size(); ++i) {
    os << format_number(series.times()[i]) << "," << format_number(series.values()[i]) << tail << "\n";
  }
}

NormSeries read_norm_series_csv(std::istream& is) {
  std::string line;
  std::size_t lineno = 0;
  bool header = false;
  NormSeries out;
  bool have_descriptor = false;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    if (!header) {
      if (line != "t,value,kind,s,p,q,r") {
        throw std::runtime_error("line " + std::to_string(lineno) + ": unexpected header '" + line + "'");
      }
      header = true;
      continue;
    }
    try {
      const auto cols = csv::split(line);
      if (cols.size() != 7) throw std::invalid_argument("expected 7 columns");
      const auto opt = [](const std::string& tok, double fallback) {
        return tok.empty() ? fallback : csv::parse_number(tok);
      };
      NormDescriptor d{norm_kind_from_string(cols[2]), opt(cols[3], 0.0), opt(cols[4], 2.0),
                       opt(cols[5], 2.0), opt(cols[6], 2.0)};
      if (!have_descriptor) {
        out = NormSeries(d);
        have_descriptor = true;
      } else if (!(d == out.descriptor())) {
        throw std::invalid_argument("descriptor changes within one file");
      }
      out.append(csv::parse_number(cols[0]), csv::parse_number(cols[1]));
    } catch (const std::invalid_argument& e) {
      throw std::runtime_error("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  if (!header) throw std::runtime_error("missing header row");
  return out;
}

}  // namespace cnls
