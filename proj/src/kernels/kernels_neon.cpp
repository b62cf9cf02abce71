#include <arm_neon.h>
#include <stddef.h>

#include "spatia/kernels.hpp"

namespace spatia::kernels {
namespace {

// vmlaq_f64 would fuse; keep mul and add separate to match the scalar rounding.
inline float64x2_t madd(float64x2_t acc, float64x2_t a, float64x2_t b) { return vaddq_f64(acc, vmulq_f64(a, b)); }

void fir_neon(const double* x, const double* h, std::size_t taps, double* out, std::size_t count) {
  std::size_t n = 0;
  const double* base = x + taps - 1;
  for (; n + 8 <= count; n += 8) {
    float64x2_t a0 = vdupq_n_f64(0.0), a1 = vdupq_n_f64(0.0);
    float64x2_t a2 = vdupq_n_f64(0.0), a3 = vdupq_n_f64(0.0);
    const double* p = base + n;
    for (std::size_t k = 0; k < taps; ++k, --p) {
      const float64x2_t hk = vdupq_n_f64(h[k]);
      a0 = madd(a0, hk, vld1q_f64(p));
      a1 = madd(a1, hk, vld1q_f64(p + 2));
      a2 = madd(a2, hk, vld1q_f64(p + 4));
      a3 = madd(a3, hk, vld1q_f64(p + 6));
    }
    vst1q_f64(out + n, a0);
    vst1q_f64(out + n + 2, a1);
    vst1q_f64(out + n + 4, a2);
    vst1q_f64(out + n + 6, a3);
  }
  for (; n < count; ++n) {
    const double* newest = base + n;
    double acc = 0.0;
    for (std::size_t k = 0; k < taps; ++k) acc += h[k] * newest[-static_cast<ptrdiff_t>(k)];
    out[n] = acc;
  }
}

void axpy_neon(double a, const double* x, double* y, std::size_t count) {
  const float64x2_t va = vdupq_n_f64(a);
  std::size_t n = 0;
  for (; n + 2 <= count; n += 2) vst1q_f64(y + n, madd(vld1q_f64(y + n), va, vld1q_f64(x + n)));
  for (; n < count; ++n) y[n] += a * x[n];
}

void ramp_axpy_neon(double g0, double step, const double* x, double* y, std::size_t count) {
  const float64x2_t vg0 = vdupq_n_f64(g0);
  const float64x2_t vstep = vdupq_n_f64(step);
  const float64x2_t two = vdupq_n_f64(2.0);
  const double first[2] = {1.0, 2.0};
  float64x2_t idx = vld1q_f64(first);
  std::size_t n = 0;
  for (; n + 2 <= count; n += 2) {
    const float64x2_t g = vaddq_f64(vg0, vmulq_f64(vstep, idx));
    vst1q_f64(y + n, madd(vld1q_f64(y + n), g, vld1q_f64(x + n)));
    idx = vaddq_f64(idx, two);
  }
  for (; n < count; ++n) {
    const double g = g0 + step * static_cast<double>(n + 1);
    y[n] += g * x[n];
  }
}

void rotate_pair_neon(double c, double s, double* x, double* y, std::size_t count) {
  const float64x2_t vc = vdupq_n_f64(c);
  const float64x2_t vs = vdupq_n_f64(s);
  std::size_t n = 0;
  for (; n + 2 <= count; n += 2) {
    const float64x2_t xn = vld1q_f64(x + n);
    const float64x2_t yn = vld1q_f64(y + n);
    vst1q_f64(x + n, vsubq_f64(vmulq_f64(vc, xn), vmulq_f64(vs, yn)));
    vst1q_f64(y + n, vaddq_f64(vmulq_f64(vs, xn), vmulq_f64(vc, yn)));
  }
  for (; n < count; ++n) {
    const double xn = x[n];
    const double yn = y[n];
    x[n] = c * xn - s * yn;
    y[n] = s * xn + c * yn;
  }
}

} // namespace

extern const KernelTable kNeonTable;
const KernelTable kNeonTable{"neon", fir_neon, axpy_neon, ramp_axpy_neon, rotate_pair_neon};

} // namespace spatia::kernels
