#include "cnls/grid.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace cnls {

bool is_power_of_two(long long v) noexcept { return v > 0 && (v & (v - 1)) == 0; }

Grid::Grid(int dim, int n, double box_length) : dim_(dim), n_(n), box_length_(box_length) {
  size_ = 1;
  for (int a = 0; a < dim_; ++a) size_ *= static_cast<std::size_t>(n_);
}

Grid Grid::make(int dim, int n, double box_length) {
  if (dim < 1 || dim > 3) {
    throw std::invalid_argument("grid dimension must be 1, 2 or 3, got " + std::to_string(dim));
  }
  if (n < 8 || !is_power_of_two(n)) {
    throw std::invalid_argument("points per axis must be a power of two >= 8, got " +
                                std::to_string(n));
  }
  if (!(box_length > 0.0) || !std::isfinite(box_length)) {
    throw std::invalid_argument("box length must be positive and finite");
  }
  return Grid(dim, n, box_length);
}

double Grid::cell_volume() const noexcept { return std::pow(spacing(), dim_); }

double Grid::volume() const noexcept { return std::pow(box_length_, dim_); }

double Grid::k_max() const noexcept { return std::numbers::pi * n_ / box_length_; }

double Grid::t_valid() const noexcept { return box_length_ / (8.0 * k_max()); }

double Grid::wavenumber(int i) const noexcept {
  return 2.0 * std::numbers::pi * mode(i) / box_length_;
}

std::array<int, 3> Grid::unflatten(std::size_t flat) const noexcept {
  std::array<int, 3> idx{0, 0, 0};
  const auto n = static_cast<std::size_t>(n_);
  for (int a = dim_ - 1; a >= 0; --a) {
    idx[a] = static_cast<int>(flat % n);
    flat /= n;
  }
  return idx;
}

}  // namespace cnls
