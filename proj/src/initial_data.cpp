#include "cnls/initial_data.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "cnls/csv.hpp"
#include "cnls/spectral.hpp"

namespace cnls {

std::string to_string(DataFamily family) {
  switch (family) {
    case DataFamily::gaussian: return "gaussian";
    case DataFamily::rough: return "rough";
    case DataFamily::plane_wave: return "plane_wave";
    case DataFamily::zero: return "zero";
  }
  return "?";
}

DataFamily data_family_from_string(const std::string& name) {
  for (auto f : {DataFamily::gaussian, DataFamily::rough, DataFamily::plane_wave, DataFamily::zero}) {
    if (to_string(f) == name) return f;
  }
  throw std::invalid_argument("unknown data family '" + name + "'");
}

double unit_uniform(std::uint64_t bits) noexcept {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

Field gaussian(const Grid& grid, double amplitude, double sigma) {
  if (!(sigma > 0.0)) throw std::invalid_argument("Gaussian width must be positive");
  const double c = 1.0 / (2.0 * sigma * sigma);
  return Field::from_function(grid, [&](const std::array<double, 3>& x) -> Complex {
    return amplitude * std::exp(-c * (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]));
  });
}

Field plane_wave(const Grid& grid, double amplitude, const std::array<int, 3>& mode) {
  const double base = 2.0 * std::numbers::pi / grid.box_length();
  return Field::from_function(grid, [&](const std::array<double, 3>& x) {
    double phase = 0.0;
    for (int a = 0; a < grid.dim(); ++a) phase += base * mode[a] * x[a];
    return std::polar(amplitude, phase);
  });
}

Field rough_random_phase(const Grid& grid, const InitialDataSpec& spec, std::uint64_t seed) {
  if (!(spec.k_lo > 0.0) || !(spec.k_hi >= spec.k_lo)) {
    throw std::invalid_argument("rough data needs 0 < k_lo <= k_hi");
  }
  std::mt19937_64 rng(seed);
  Field f(grid, Representation::fourier);
  auto vals = f.values();
  for (std::size_t i = 0; i < vals.size(); ++i) {
    const double phase = 2.0 * std::numbers::pi * unit_uniform(rng());
    const double k = std::sqrt(wavenumber_squared(grid, i));
    if (k >= spec.k_lo && k <= spec.k_hi) vals[i] = std::polar(std::pow(k, -spec.alpha), phase);
  }
  f.convert(Representation::physical);
  if (spec.envelope > 0.0) {
    const double c = 1.0 / (2.0 * spec.envelope * spec.envelope);
    auto x = f.values();
    for (std::size_t i = 0; i < x.size(); ++i) {
      const auto p = position(grid, i);
      x[i] *= std::exp(-c * (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]));
    }
  }
  const double sup = max_modulus_upsampled(f);
  if (sup > 0.0) f *= Complex{spec.amplitude / sup};
  return f;
}

Field make_initial_data(const Grid& grid, const InitialDataSpec& spec, std::uint64_t seed) {
  switch (spec.family) {
    case DataFamily::gaussian: return gaussian(grid, spec.amplitude, spec.sigma);
    case DataFamily::rough: return rough_random_phase(grid, spec, seed);
    case DataFamily::plane_wave: return plane_wave(grid, spec.amplitude, spec.mode);
    case DataFamily::zero: return Field(grid, Representation::physical);
  }
  throw std::invalid_argument("unknown data family");
}

std::string describe(const InitialDataSpec& spec, std::uint64_t seed) {
  using csv::format_number;
  std::string s = to_string(spec.family) + " amplitude=" + format_number(spec.amplitude);
  switch (spec.family) {
    case DataFamily::gaussian:
      s += " sigma=" + format_number(spec.sigma);
      break;
    case DataFamily::rough:
      s += " alpha=" + format_number(spec.alpha) + " k_lo=" + format_number(spec.k_lo) +
           " k_hi=" + format_number(spec.k_hi) + " envelope=" + format_number(spec.envelope) +
           " seed=" + std::to_string(seed);
      break;
    case DataFamily::plane_wave:
      s += " mode=" + std::to_string(spec.mode[0]) + ":" + std::to_string(spec.mode[1]) + ":" +
           std::to_string(spec.mode[2]);
      break;
    case DataFamily::zero:
      break;
  }
  return s;
}

}  // namespace cnls
