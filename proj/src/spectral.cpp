#include "unred/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>

namespace unred::spectral {

namespace {

// FFTW planning is not thread-safe; execution with the new-array interface
// is. Plans are created once per size under a lock and shared read-only.
struct Plans {
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;

  ~Plans() {
    fftw_destroy_plan(forward);
    fftw_destroy_plan(backward);
  }
};

template <typename T>
struct FftwDeleter {
  void operator()(T* p) const { fftw_free(p); }
};

template <typename T>
using FftwBuffer = std::unique_ptr<T[], FftwDeleter<T>>;

FftwBuffer<double> alloc_real(std::size_t n) {
  return FftwBuffer<double>(fftw_alloc_real(n));
}

FftwBuffer<fftw_complex> alloc_complex(std::size_t n) {
  return FftwBuffer<fftw_complex>(fftw_alloc_complex(n));
}

const Plans& plans_for(std::size_t n) {
  static std::mutex mutex;
  static std::map<std::size_t, std::unique_ptr<Plans>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[n];
  if (!slot) {
    auto real = alloc_real(n);
    auto cplx = alloc_complex(n / 2 + 1);
    slot = std::make_unique<Plans>();
    const int size = static_cast<int>(n);
    slot->forward = fftw_plan_dft_r2c_1d(size, real.get(), cplx.get(), FFTW_ESTIMATE);
    slot->backward = fftw_plan_dft_c2r_1d(size, cplx.get(), real.get(), FFTW_ESTIMATE);
  }
  return *slot;
}

std::vector<double> derivative_weights(std::size_t n) {
  const double h = 2.0 * std::numbers::pi / static_cast<double>(n);
  const std::size_t half = (n - 1) / 2;
  std::vector<double> w(half);
  for (std::size_t k = 1; k <= half; ++k) {
    const double sign = (k % 2 == 0) ? 1.0 : -1.0;
    const double x = 0.5 * static_cast<double>(k) * h;
    w[k - 1] = (n % 2 == 0) ? -0.5 * sign / std::tan(x) : -0.5 * sign / std::sin(x);
  }
  return w;
}

}  // namespace

Field fourier_multiply(std::span<const double> f,
                       const std::function<double(std::size_t)>& multiplier) {
  const std::size_t n = f.size();
  const Plans& plans = plans_for(n);
  auto real = alloc_real(n);
  auto cplx = alloc_complex(n / 2 + 1);
  std::copy(f.begin(), f.end(), real.get());
  fftw_execute_dft_r2c(plans.forward, real.get(), cplx.get());
  const double scale = 1.0 / static_cast<double>(n);
  for (std::size_t k = 0; k <= n / 2; ++k) {
    const double m = multiplier(k) * scale;
    cplx[k][0] *= m;
    cplx[k][1] *= m;
  }
  fftw_execute_dft_c2r(plans.backward, cplx.get(), real.get());
  return Field(real.get(), real.get() + n);
}

Points periodic_derivative(std::span<const Point> c) {
  const std::size_t n = c.size();
  const auto w = derivative_weights(n);
  Points out(n, Point::Zero());
  for (std::size_t i = 0; i < n; ++i) {
    Point acc = Point::Zero();
    for (std::size_t k = 1; k <= w.size(); ++k) {
      acc += w[k - 1] * (c[(i + k) % n] - c[(i + n - k) % n]);
    }
    out[i] = acc;
  }
  return out;
}

Field periodic_derivative(std::span<const double> f) {
  const std::size_t n = f.size();
  const auto w = derivative_weights(n);
  Field out(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (std::size_t k = 1; k <= w.size(); ++k) {
      acc += w[k - 1] * (f[(i + k) % n] - f[(i + n - k) % n]);
    }
    out[i] = acc;
  }
  return out;
}

}  // namespace unred::spectral
