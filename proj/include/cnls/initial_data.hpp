#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "cnls/field.hpp"

namespace cnls {

enum class DataFamily : std::uint8_t { gaussian, rough, plane_wave, zero };

/// Parameters of the initial-data library. Fields not used by a family are
/// ignored.
struct InitialDataSpec {
  DataFamily family = DataFamily::gaussian;
  double amplitude = 1.0;
  /// Gaussian width: a exp(-|x|^2 / (2 sigma^2)).
  double sigma = 1.0;
  /// Rough data: Fourier magnitudes |k|^{-alpha} on k_lo <= |k| <= k_hi with
  /// random phases, optionally multiplied by a Gaussian envelope of width
  /// `envelope` (0 disables it), then scaled so the sup norm is `amplitude`.
  double alpha = 2.0;
  double k_lo = 1.0;
  double k_hi = 4.0;
  double envelope = 0.0;
  /// Plane wave: a exp(i k.x) with k = 2 pi m / L.
  std::array<int, 3> mode{1, 0, 0};
};

std::string to_string(DataFamily family);
DataFamily data_family_from_string(const std::string& name);

Field gaussian(const Grid& grid, double amplitude, double sigma);
Field plane_wave(const Grid& grid, double amplitude, const std::array<int, 3>& mode);
Field rough_random_phase(const Grid& grid, const InitialDataSpec& spec, std::uint64_t seed);

/// Builds the field described by `spec`; `seed` only affects rough data.
Field make_initial_data(const Grid& grid, const InitialDataSpec& spec, std::uint64_t seed);
/// One-line description recorded as trajectory provenance.
std::string describe(const InitialDataSpec& spec, std::uint64_t seed);

/// Uniform double in [0, 1) from the top 53 bits of a 64-bit draw; unlike
/// std::uniform_real_distribution this is identical across standard libraries.
double unit_uniform(std::uint64_t bits) noexcept;

}  // namespace cnls
