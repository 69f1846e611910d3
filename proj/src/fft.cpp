#include "cnls/fft.hpp"

#include <map>
#include <mutex>
#include <stdexcept>
#include <tuple>

namespace cnls {
namespace {

enum class PlanKind { c2c_forward, c2c_backward, r2c, c2r };

std::size_t total_size(int dim, int n) {
  std::size_t s = 1;
  for (int a = 0; a < dim; ++a) s *= static_cast<std::size_t>(n);
  return s;
}

// FFTW's planner is not thread-safe; execution of an existing plan on new
// arrays is. Plans are created once per (kind, dim, n) and never destroyed.
class PlanCache {
 public:
  fftw_plan get(PlanKind kind, int dim, int n) {
    std::lock_guard lock(mutex_);
    auto key = std::make_tuple(kind, dim, n);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;

    int dims[3] = {n, n, n};
    const std::size_t count = total_size(dim, n);
    fftw_plan plan = nullptr;
    switch (kind) {
      case PlanKind::c2c_forward:
      case PlanKind::c2c_backward: {
        ComplexBuffer tmp(count);
        auto* p = reinterpret_cast<fftw_complex*>(tmp.data());
        plan = fftw_plan_dft(dim, dims, p, p,
                             kind == PlanKind::c2c_forward ? FFTW_FORWARD : FFTW_BACKWARD,
                             FFTW_ESTIMATE);
        break;
      }
      case PlanKind::r2c: {
        RealBuffer in(count);
        ComplexBuffer out(half_spectrum_size(dim, n));
        plan = fftw_plan_dft_r2c(dim, dims, in.data(),
                                 reinterpret_cast<fftw_complex*>(out.data()), FFTW_ESTIMATE);
        break;
      }
      case PlanKind::c2r: {
        ComplexBuffer in(half_spectrum_size(dim, n));
        RealBuffer out(count);
        plan = fftw_plan_dft_c2r(dim, dims, reinterpret_cast<fftw_complex*>(in.data()),
                                 out.data(), FFTW_ESTIMATE);
        break;
      }
    }
    if (plan == nullptr) throw std::runtime_error("FFTW failed to create a plan");
    plans_.emplace(key, plan);
    return plan;
  }

 private:
  std::mutex mutex_;
  std::map<std::tuple<PlanKind, int, int>, fftw_plan> plans_;
};

PlanCache& cache() {
  static PlanCache instance;
  return instance;
}

template <class T>
bool aligned(const T* p) {
  return fftw_alignment_of(reinterpret_cast<double*>(const_cast<T*>(p))) == 0;
}

}  // namespace

std::size_t half_spectrum_size(int dim, int n) noexcept {
  return total_size(dim - 1, n) * static_cast<std::size_t>(n / 2 + 1);
}

void fft_inplace(std::span<Complex> data, int dim, int n, Direction dir) {
  const std::size_t count = total_size(dim, n);
  if (data.size() != count) throw std::invalid_argument("fft_inplace: size mismatch");
  fftw_plan plan =
      cache().get(dir == Direction::forward ? PlanKind::c2c_forward : PlanKind::c2c_backward,
                  dim, n);
  if (aligned(data.data())) {
    auto* p = reinterpret_cast<fftw_complex*>(data.data());
    fftw_execute_dft(plan, p, p);
  } else {
    ComplexBuffer tmp(data.begin(), data.end());
    auto* p = reinterpret_cast<fftw_complex*>(tmp.data());
    fftw_execute_dft(plan, p, p);
    std::copy(tmp.begin(), tmp.end(), data.begin());
  }
  if (dir == Direction::backward) {
    const double scale = 1.0 / static_cast<double>(count);
    for (auto& z : data) z *= scale;
  }
}

void rfft(std::span<const double> in, std::span<Complex> out, int dim, int n) {
  if (in.size() != total_size(dim, n) || out.size() != half_spectrum_size(dim, n)) {
    throw std::invalid_argument("rfft: size mismatch");
  }
  fftw_plan plan = cache().get(PlanKind::r2c, dim, n);
  RealBuffer src(in.begin(), in.end());
  if (aligned(out.data())) {
    fftw_execute_dft_r2c(plan, src.data(), reinterpret_cast<fftw_complex*>(out.data()));
  } else {
    ComplexBuffer dst(out.size());
    fftw_execute_dft_r2c(plan, src.data(), reinterpret_cast<fftw_complex*>(dst.data()));
    std::copy(dst.begin(), dst.end(), out.begin());
  }
}

void irfft(std::span<Complex> in, std::span<double> out, int dim, int n) {
  const std::size_t count = total_size(dim, n);
  if (out.size() != count || in.size() != half_spectrum_size(dim, n)) {
    throw std::invalid_argument("irfft: size mismatch");
  }
  fftw_plan plan = cache().get(PlanKind::c2r, dim, n);
  ComplexBuffer src(in.begin(), in.end());
  RealBuffer dst(count);
  fftw_execute_dft_c2r(plan, reinterpret_cast<fftw_complex*>(src.data()), dst.data());
  const double scale = 1.0 / static_cast<double>(count);
  for (std::size_t i = 0; i < count; ++i) out[i] = dst[i] * scale;
}

}  // namespace cnls
