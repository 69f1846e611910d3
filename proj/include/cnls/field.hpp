#pragma once

#include <array>
#include <cstdint>
#include <span>

#include "cnls/fft.hpp"
#include "cnls/grid.hpp"

namespace cnls {

enum class Representation : std::uint8_t { physical = 0, fourier = 1 };

/// Complex function on a periodic grid, held either as point values or as
/// (unnormalized) Fourier coefficients. Values are row-major with axis 0
/// slowest; Fourier coefficients use FFT ordering on every axis.
class Field {
 public:
  Field(const Grid& grid, Representation rep);
  Field(const Grid& grid, ComplexBuffer values, Representation rep);

  /// Samples f(x) at every lattice point; x holds (x0, x1, x2), unused axes 0.
  template <class Fn>
  static Field from_function(const Grid& grid, Fn&& f) {
    Field out(grid, Representation::physical);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const auto idx = grid.unflatten(i);
      std::array<double, 3> x{0.0, 0.0, 0.0};
      for (int a = 0; a < grid.dim(); ++a) x[a] = grid.coordinate(idx[a]);
      out.values_[i] = f(x);
    }
    return out;
  }

  const Grid& grid() const noexcept { return grid_; }
  Representation representation() const noexcept { return rep_; }
  std::span<const Complex> values() const noexcept { return values_; }
  std::span<Complex> values() noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }

  Field to_fourier() const;
  Field to_physical() const;
  Field in(Representation rep) const;
  /// Converts in place.
  void convert(Representation rep);

  bool is_finite() const noexcept;

  Field& operator+=(const Field& other);
  Field& operator-=(const Field& other);
  Field& operator*=(Complex scale) noexcept;

 private:
  Grid grid_;
  Representation rep_;
  ComplexBuffer values_;
};

Field operator+(Field a, const Field& b);
Field operator-(Field a, const Field& b);
Field operator*(Complex scale, Field f);

/// Coordinates of lattice point `flat` as (x0, x1, x2).
std::array<double, 3> position(const Grid& grid, std::size_t flat) noexcept;
/// Wavevector of Fourier index `flat` as (k0, k1, k2).
std::array<double, 3> wavevector(const Grid& grid, std::size_t flat) noexcept;
double wavenumber_squared(const Grid& grid, std::size_t flat) noexcept;

}  // namespace cnls
