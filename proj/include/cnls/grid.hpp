#pragma once

#include <array>
#include <cstddef>

namespace cnls {

/// Periodic box [-L/2, L/2)^dim sampled with n points per axis.
///
/// Wavenumbers on each axis are k = 2*pi*m/L with m in {-n/2, ..., n/2-1},
/// stored in FFT order (m = 0, 1, ..., n/2-1, -n/2, ..., -1).
class Grid {
 public:
  /// Validates and builds a grid. Throws std::invalid_argument when dim is
  /// outside {1,2,3}, n is not a power of two >= 8, or box_length <= 0.
  static Grid make(int dim, int n, double box_length);

  int dim() const noexcept { return dim_; }
  int n() const noexcept { return n_; }
  double box_length() const noexcept { return box_length_; }

  /// Number of lattice points, n^dim.
  std::size_t size() const noexcept { return size_; }
  double spacing() const noexcept { return box_length_ / n_; }
  double cell_volume() const noexcept;
  double volume() const noexcept;

  /// Nyquist wavenumber pi*n/L.
  double k_max() const noexcept;
  /// Horizon before the fastest resolved wave (group velocity 2*k_max)
  /// can wrap around the box: L / (8 k_max).
  double t_valid() const noexcept;

  /// Signed mode number m for FFT-ordered axis index i.
  int mode(int i) const noexcept { return i < n_ / 2 ? i : i - n_; }
  double wavenumber(int i) const noexcept;
  /// Physical coordinate of axis index i, in [-L/2, L/2).
  double coordinate(int i) const noexcept { return (i - n_ / 2) * spacing(); }

  /// Splits a flat row-major index into per-axis indices (unused axes are 0).
  std::array<int, 3> unflatten(std::size_t flat) const noexcept;

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  Grid(int dim, int n, double box_length);

  int dim_ = 1;
  int n_ = 8;
  double box_length_ = 1.0;
  std::size_t size_ = 8;
};

inline Grid make_grid(int dim, int n, double box_length) {
  return Grid::make(dim, n, box_length);
}

bool is_power_of_two(long long v) noexcept;

}  // namespace cnls
