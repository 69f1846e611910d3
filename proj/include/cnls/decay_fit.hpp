#pragma once

#include <span>

#include "cnls/norms.hpp"

namespace cnls {

/// Least-squares line through (log t, log value): value ~ e^{log_prefactor} t^{exponent}.
struct DecayFit {
  double exponent = 0.0;
  double log_prefactor = 0.0;
  double residual_rms = 0.0;
  double t_lo = 0.0;
  double t_hi = 0.0;
  int n_samples = 0;
};

/// Fits the samples with t_lo <= t <= t_hi. Throws std::invalid_argument with
/// fewer than 4 samples in the window or a non-positive value or time.
DecayFit fit_decay_rate(std::span<const double> times, std::span<const double> values, double t_lo,
                        double t_hi);
DecayFit fit_decay_rate(const NormSeries& series, double t_lo, double t_hi);

/// `count` points geometrically spaced on [t_lo, t_hi], endpoints included.
std::vector<double> log_spaced(double t_lo, double t_hi, int count);

/// Premultiplied series s_i = (scale t_i)^{-target} v_i (so a bound
/// v <~ (scale t)^{target} makes s bounded). sup is its maximum; stability
/// compares the sup over samples [0, n-2] with the sup over [1, n-1] as
/// max/min (1 = unaffected by shifting the window one sample).
struct Premultiplied {
  double sup = 0.0;
  double stability = 1.0;
};

Premultiplied premultiplied(std::span<const double> times, std::span<const double> values,
                            double target, double scale = 1.0);

}  // namespace cnls
