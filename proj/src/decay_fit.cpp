#include "cnls/decay_fit.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cnls {

DecayFit fit_decay_rate(std::span<const double> times, std::span<const double> values, double t_lo,
                        double t_hi) {
  if (times.size() != values.size()) throw std::invalid_argument("times and values differ in length");
  std::vector<double> x;
  std::vector<double> y;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] < t_lo || times[i] > t_hi) continue;
    if (!(times[i] > 0.0) || !(values[i] > 0.0) || !std::isfinite(values[i])) {
      throw std::invalid_argument("decay fits need positive times and values");
    }
    x.push_back(std::log(times[i]));
    y.push_back(std::log(values[i]));
  }
  if (x.size() < 4) {
    throw std::invalid_argument("decay fit needs at least 4 samples in the window, got " +
                                std::to_string(x.size()));
  }
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw std::invalid_argument("decay fit window has no spread in time");
  DecayFit fit;
  fit.exponent = sxy / sxx;
  fit.log_prefactor = my - fit.exponent * mx;
  double rss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (fit.log_prefactor + fit.exponent * x[i]);
    rss += r * r;
  }
  fit.residual_rms = std::sqrt(rss / n);
  fit.t_lo = t_lo;
  fit.t_hi = t_hi;
  fit.n_samples = static_cast<int>(x.size());
  return fit;
}

DecayFit fit_decay_rate(const NormSeries& series, double t_lo, double t_hi) {
  return fit_decay_rate(series.times(), series.values(), t_lo, t_hi);
}

std::vector<double> log_spaced(double t_lo, double t_hi, int count) {
  if (!(t_lo > 0.0) || !(t_hi > t_lo) || count < 2) {
    throw std::invalid_argument("log_spaced needs 0 < t_lo < t_hi and count >= 2");
  }
  std::vector<double> out(static_cast<std::size_t>(count));
  const double r = std::log(t_hi / t_lo);
  for (int i = 0; i < count; ++i) out[i] = t_lo * std::exp(r * i / (count - 1));
  out.front() = t_lo;
  out.back() = t_hi;
  return out;
}

Premultiplied premultiplied(std::span<const double> times, std::span<const double> values,
                            double target, double scale) {
  if (times.size() != values.size()) throw std::invalid_argument("times and values differ in length");
  Premultiplied out;
  if (times.empty()) return out;
  std::vector<double> s(times.size());
  for (std::size_t i = 0; i < times.size(); ++i) s[i] = std::pow(scale * times[i], -target) * values[i];
  out.sup = *std::max_element(s.begin(), s.end());
  if (s.size() >= 2) {
    const double a = *std::max_element(s.begin(), s.end() - 1);
    const double b = *std::max_element(s.begin() + 1, s.end());
    const double hi = std::max(a, b);
    const double lo = std::min(a, b);
    out.stability = hi == 0.0 ? 1.0 : (lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity());
  }
  return out;
}

}  // namespace cnls
