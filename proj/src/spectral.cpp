#include "cnls/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace cnls {

Field fractional_derivative(const Field& f, double s) {
  if (!(s >= 0.0)) throw std::invalid_argument("fractional derivative order must be >= 0");
  if (s == 0.0) return f;
  return apply_symbol(f, [s](const std::array<double, 3>&, double k2) -> Complex {
    return k2 == 0.0 ? 0.0 : std::pow(k2, 0.5 * s);
  });
}

std::vector<Field> gradient(const Field& f) {
  const Grid& g = f.grid();
  const Field fh = f.to_fourier();
  std::vector<Field> out;
  out.reserve(g.dim());
  for (int a = 0; a < g.dim(); ++a) {
    Field comp = fh;
    auto vals = comp.values();
    for (std::size_t i = 0; i < vals.size(); ++i) {
      const auto idx = g.unflatten(i);
      if (idx[a] == g.n() / 2) {
        vals[i] = 0.0;
      } else {
        vals[i] *= Complex{0.0, g.wavenumber(idx[a])};
      }
    }
    comp.convert(f.representation());
    out.push_back(std::move(comp));
  }
  return out;
}

Field laplacian(const Field& f) {
  return apply_symbol(f, [](const std::array<double, 3>&, double k2) -> Complex { return -k2; });
}

Field free_propagate(const Field& f, double t) {
  if (t == 0.0) return f;
  return apply_symbol(f, [t](const std::array<double, 3>&, double k2) {
    return std::polar(1.0, -k2 * t);
  });
}

double lp_symbol(int j, double k_abs) noexcept {
  if (!(k_abs > 0.0)) return 0.0;
  const double s = std::log2(k_abs) - j;
  if (std::abs(s) >= 1.0) return 0.0;
  const double c = std::cos(0.5 * std::numbers::pi * s);
  return c * c;
}

double lp_low_symbol(int j_min, double k_abs) noexcept {
  if (!(k_abs > 0.0)) return 1.0;
  const double s = std::log2(k_abs) - j_min;
  if (s <= -1.0) return 1.0;
  if (s >= 0.0) return 0.0;
  const double c = std::sin(0.5 * std::numbers::pi * s);
  return c * c;
}

Field lp_project(const Field& f, const LPBand& band) {
  if (band.j < band.j_min) throw std::invalid_argument("LP band index below the low block");
  const int j = band.j;
  return apply_symbol(f, [j](const std::array<double, 3>&, double k2) -> Complex {
    return lp_symbol(j, std::sqrt(k2));
  });
}

Field lp_project_low(const Field& f, int j_min) {
  return apply_symbol(f, [j_min](const std::array<double, 3>&, double k2) -> Complex {
    return lp_low_symbol(j_min, std::sqrt(k2));
  });
}

int lp_default_j_min(const Grid& grid) noexcept {
  return static_cast<int>(std::floor(std::log2(2.0 * std::numbers::pi / grid.box_length())));
}

int lp_top_band(const Grid& grid) noexcept {
  const double k_corner = grid.k_max() * std::sqrt(static_cast<double>(grid.dim()));
  // psi_j vanishes once 2^{j-1} >= k_corner
  return static_cast<int>(std::ceil(std::log2(k_corner))) + 1;
}

int lp_top_resolvable_band(const Grid& grid) noexcept {
  return static_cast<int>(std::floor(std::log2(grid.k_max()))) - 1;
}

Field upsample(const Field& f, int factor) {
  if (factor < 1 || !is_power_of_two(factor)) {
    throw std::invalid_argument("upsampling factor must be a power of two");
  }
  const Grid& g = f.grid();
  const Grid fine = Grid::make(g.dim(), g.n() * factor, g.box_length());
  const Field fh = f.to_fourier();
  Field out(fine, Representation::fourier);
  auto dst = out.values();
  const auto src = fh.values();
  const int n = g.n();
  const int nf = fine.n();
  const double gain = std::pow(static_cast<double>(factor), g.dim());

  for (std::size_t i = 0; i < src.size(); ++i) {
    const auto idx = g.unflatten(i);
    // per-axis targets on the fine grid (one, or two for the Nyquist mode)
    std::array<std::array<int, 2>, 3> target{};
    std::array<int, 3> count{1, 1, 1};
    double weight = gain;
    for (int a = 0; a < g.dim(); ++a) {
      const int m = g.mode(idx[a]);
      if (m == -n / 2 && factor > 1) {
        target[a] = {n / 2, nf - n / 2};
        count[a] = 2;
        weight *= 0.5;
      } else {
        target[a] = {m >= 0 ? m : nf + m, 0};
      }
    }
    for (int c0 = 0; c0 < count[0]; ++c0) {
      for (int c1 = 0; c1 < count[1]; ++c1) {
        for (int c2 = 0; c2 < count[2]; ++c2) {
          const std::array<int, 3> pick{c0, c1, c2};
          std::size_t flat = 0;
          for (int a = 0; a < g.dim(); ++a) {
            flat = flat * static_cast<std::size_t>(nf) + static_cast<std::size_t>(target[a][pick[a]]);
          }
          dst[flat] += weight * src[i];
        }
      }
    }
  }
  out.convert(Representation::physical);
  return out;
}

double max_modulus_upsampled(const Field& f) {
  const Field fine = upsample(f, 2);
  double m = 0.0;
  for (const auto& z : fine.values()) m = std::max(m, std::abs(z));
  return m;
}

double max_norm_upsampled(std::span<const Field> components) {
  if (components.empty()) return 0.0;
  std::vector<double> acc;
  for (const auto& c : components) {
    const Field fine = upsample(c, 2);
    const auto v = fine.values();
    if (acc.empty()) acc.assign(v.size(), 0.0);
    for (std::size_t i = 0; i < v.size(); ++i) acc[i] += std::norm(v[i]);
  }
  double m = 0.0;
  for (double a : acc) m = std::max(m, a);
  return std::sqrt(m);
}

double mass_fraction_within(const Field& f, double radius) {
  const Field x = f.to_physical();
  const auto vals = x.values();
  double inside = 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < vals.size(); ++i) {
    const auto p = position(f.grid(), i);
    const double m = std::norm(vals[i]);
    total += m;
    if (p[0] * p[0] + p[1] * p[1] + p[2] * p[2] < radius * radius) inside += m;
  }
  return total > 0.0 ? inside / total : 0.0;
}

bool is_localized(const Field& f) {
  return mass_fraction_within(f, 0.25 * f.grid().box_length()) >= 0.99;
}

}  // namespace cnls
