#pragma once

#include <span>
#include <vector>

#include "cnls/field.hpp"

namespace cnls {

/// Multiplies the Fourier coefficients of `f` by symbol(k, |k|^2) and returns
/// the result in the representation `f` arrived in.
template <class Symbol>
Field apply_symbol(const Field& f, Symbol&& symbol) {
  Field out = f.to_fourier();
  auto vals = out.values();
  const Grid& g = f.grid();
  for (std::size_t i = 0; i < vals.size(); ++i) {
    const auto k = wavevector(g, i);
    vals[i] *= symbol(k, k[0] * k[0] + k[1] * k[1] + k[2] * k[2]);
  }
  out.convert(f.representation());
  return out;
}

/// |grad|^s f, symbol |k|^s. The zero mode is removed when s > 0 and s = 0 is
/// the identity. Throws std::invalid_argument for s < 0.
Field fractional_derivative(const Field& f, double s);

/// Components of grad f (symbol i k_a). The Nyquist mode of each
/// differentiated axis is dropped so real input stays real.
std::vector<Field> gradient(const Field& f);

Field laplacian(const Field& f);

/// Exact free Schroedinger flow e^{it Laplacian}: symbol exp(-i |k|^2 t).
Field free_propagate(const Field& f, double t);

/// Littlewood-Paley band: raised-cosine bump in log2|k|,
///   psi_j(|k|) = cos^2(pi/2 (log2|k| - j))  for |log2|k| - j| < 1,
/// so consecutive bumps sum to one. Frequencies below 2^j_min that are not
/// covered by the bands j >= j_min form the low block.
struct LPBand {
  int j = 0;
  int j_min = 0;
};

double lp_symbol(int j, double k_abs) noexcept;
/// 1 - sum_{j >= j_min} psi_j, which includes the zero mode.
double lp_low_symbol(int j_min, double k_abs) noexcept;

/// Throws std::invalid_argument if band.j < band.j_min.
Field lp_project(const Field& f, const LPBand& band);
Field lp_project_low(const Field& f, int j_min);

/// Default j_min: the low block holds only the zero mode.
int lp_default_j_min(const Grid& grid) noexcept;
/// Smallest j whose bump still touches the lattice (the corner |k| = sqrt(dim) k_max).
int lp_top_band(const Grid& grid) noexcept;
/// Largest j whose whole annulus 2^{j+1} fits below k_max.
int lp_top_resolvable_band(const Grid& grid) noexcept;

/// Zero-padded trigonometric interpolation onto a grid with `factor` times
/// more points per axis. The Nyquist coefficient is split evenly between
/// the +/- Nyquist modes of the fine grid.
Field upsample(const Field& f, int factor = 2);

/// max_x |f(x)| evaluated on the 2x upsampled grid.
double max_modulus_upsampled(const Field& f);
/// max_x sqrt(sum_a |f_a(x)|^2) for a vector field, on the 2x upsampled grid.
double max_norm_upsampled(std::span<const Field> components);

/// Fraction of the mass inside the ball |x| < radius about the origin.
double mass_fraction_within(const Field& f, double radius);
/// True when at least 99% of the mass lies within |x| < L/4.
bool is_localized(const Field& f);

}  // namespace cnls
