#include "spatia/kernels.hpp"

namespace spatia::kernels {
namespace {

void fir_scalar(const double* x, const double* h, std::size_t taps, double* out, std::size_t count) {
  for (std::size_t n = 0; n < count; ++n) {
    const double* newest = x + n + taps - 1;
    double acc = 0.0;
    for (std::size_t k = 0; k < taps; ++k) acc += h[k] * newest[-static_cast<std::ptrdiff_t>(k)];
    out[n] = acc;
  }
}

void axpy_scalar(double a, const double* x, double* y, std::size_t count) {
  for (std::size_t n = 0; n < count; ++n) y[n] += a * x[n];
}

void ramp_axpy_scalar(double g0, double step, const double* x, double* y, std::size_t count) {
  for (std::size_t n = 0; n < count; ++n) {
    const double g = g0 + step * static_cast<double>(n + 1);
    y[n] += g * x[n];
  }
}

void rotate_pair_scalar(double c, double s, double* x, double* y, std::size_t count) {
  for (std::size_t n = 0; n < count; ++n) {
    const double xn = x[n];
    const double yn = y[n];
    x[n] = c * xn - s * yn;
    y[n] = s * xn + c * yn;
  }
}

const KernelTable kScalar{"scalar", fir_scalar, axpy_scalar, ramp_axpy_scalar, rotate_pair_scalar};

} // namespace

const KernelTable& scalar() { return kScalar; }

} // namespace spatia::kernels
