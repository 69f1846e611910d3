#include "cnls/field.hpp"

#include <cmath>
#include <stdexcept>

namespace cnls {

Field::Field(const Grid& grid, Representation rep)
    : grid_(grid), rep_(rep), values_(grid.size(), Complex{0.0, 0.0}) {}

Field::Field(const Grid& grid, ComplexBuffer values, Representation rep)
    : grid_(grid), rep_(rep), values_(std::move(values)) {
  if (values_.size() != grid_.size()) {
    throw std::invalid_argument("field value count does not match grid size");
  }
}

void Field::convert(Representation rep) {
  if (rep == rep_) return;
  fft_inplace(values_, grid_.dim(), grid_.n(),
              rep == Representation::fourier ? Direction::forward : Direction::backward);
  rep_ = rep;
}

Field Field::in(Representation rep) const {
  Field out = *this;
  out.convert(rep);
  return out;
}

Field Field::to_fourier() const { return in(Representation::fourier); }

Field Field::to_physical() const { return in(Representation::physical); }

bool Field::is_finite() const noexcept {
  for (const auto& z : values_) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  }
  return true;
}

Field& Field::operator+=(const Field& other) {
  if (!(other.grid_ == grid_)) throw std::invalid_argument("field grids differ");
  if (other.rep_ != rep_) return *this += other.in(rep_);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
  return *this;
}

Field& Field::operator-=(const Field& other) {
  if (!(other.grid_ == grid_)) throw std::invalid_argument("field grids differ");
  if (other.rep_ != rep_) return *this -= other.in(rep_);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
  return *this;
}

Field& Field::operator*=(Complex scale) noexcept {
  for (auto& z : values_) z *= scale;
  return *this;
}

Field operator+(Field a, const Field& b) { return a += b; }

Field operator-(Field a, const Field& b) { return a -= b; }

Field operator*(Complex scale, Field f) { return f *= scale; }

std::array<double, 3> position(const Grid& grid, std::size_t flat) noexcept {
  const auto idx = grid.unflatten(flat);
  std::array<double, 3> x{0.0, 0.0, 0.0};
  for (int a = 0; a < grid.dim(); ++a) x[a] = grid.coordinate(idx[a]);
  return x;
}

std::array<double, 3> wavevector(const Grid& grid, std::size_t flat) noexcept {
  const auto idx = grid.unflatten(flat);
  std::array<double, 3> k{0.0, 0.0, 0.0};
  for (int a = 0; a < grid.dim(); ++a) k[a] = grid.wavenumber(idx[a]);
  return k;
}

double wavenumber_squared(const Grid& grid, std::size_t flat) noexcept {
  const auto k = wavevector(grid, flat);
  return k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
}

}  // namespace cnls
