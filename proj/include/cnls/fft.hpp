#pragma once

#include <complex>
#include <cstddef>
#include <new>
#include <span>
#include <vector>

#include <fftw3.h>

namespace cnls {

using Complex = std::complex<double>;

/// Allocator returning FFTW-aligned storage so cached plans can run on any buffer.
template <class T>
struct FftwAllocator {
  using value_type = T;

  FftwAllocator() noexcept = default;
  template <class U>
  FftwAllocator(const FftwAllocator<U>&) noexcept {}

  T* allocate(std::size_t count) {
    void* p = fftw_malloc(count * sizeof(T));
    if (p == nullptr) throw std::bad_alloc();
    return static_cast<T*>(p);
  }
  void deallocate(T* p, std::size_t) noexcept { fftw_free(p); }

  template <class U>
  bool operator==(const FftwAllocator<U>&) const noexcept {
    return true;
  }
};

using ComplexBuffer = std::vector<Complex, FftwAllocator<Complex>>;
using RealBuffer = std::vector<double, FftwAllocator<double>>;

enum class Direction { forward, backward };

// Normalization convention used everywhere in the library: the forward
// transform is unnormalized, u_hat[m] = sum_x u[x] exp(-i k_m x), and the
// backward transform divides by n^dim. Hence
//   sum_x |u|^2 * h^dim = (L^dim / n^(2 dim)) * sum_m |u_hat|^2.

/// In-place complex transform of an n^dim row-major array.
void fft_inplace(std::span<Complex> data, int dim, int n, Direction dir);

/// Number of complex outputs of a real-to-complex transform: n^(dim-1) * (n/2+1).
std::size_t half_spectrum_size(int dim, int n) noexcept;

/// Real-to-complex forward transform (unnormalized). `in` is preserved.
void rfft(std::span<const double> in, std::span<Complex> out, int dim, int n);

/// Complex-to-real backward transform including the 1/n^dim factor.
/// `in` is used as scratch and is overwritten.
void irfft(std::span<Complex> in, std::span<double> out, int dim, int n);

}  // namespace cnls
