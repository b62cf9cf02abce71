#include "spatia/kernels.hpp"

#include <immintrin.h>

#if !defined(__AVX2__)
#error kernels_avx2.cpp must be compiled with -mavx2
#endif

namespace spatia::kernels {
namespace {

// Multiplies and adds are kept as separate instructions so every lane rounds
// exactly like the scalar reference.
inline __m256d madd(__m256d acc, __m256d a, __m256d b) { return _mm256_add_pd(acc, _mm256_mul_pd(a, b)); }

void fir_avx2(const double* x, const double* h, std::size_t taps, double* out, std::size_t count) {
  std::size_t n = 0;
  const double* base = x + taps - 1;
  for (; n + 16 <= count; n += 16) {
    __m256d a0 = _mm256_setzero_pd(), a1 = _mm256_setzero_pd();
    __m256d a2 = _mm256_setzero_pd(), a3 = _mm256_setzero_pd();
    const double* p = base + n;
    for (std::size_t k = 0; k < taps; ++k, --p) {
      const __m256d hk = _mm256_broadcast_sd(h + k);
      a0 = madd(a0, hk, _mm256_loadu_pd(p));
      a1 = madd(a1, hk, _mm256_loadu_pd(p + 4));
      a2 = madd(a2, hk, _mm256_loadu_pd(p + 8));
      a3 = madd(a3, hk, _mm256_loadu_pd(p + 12));
    }
    _mm256_storeu_pd(out + n, a0);
    _mm256_storeu_pd(out + n + 4, a1);
    _mm256_storeu_pd(out + n + 8, a2);
    _mm256_storeu_pd(out + n + 12, a3);
  }
  for (; n + 4 <= count; n += 4) {
    __m256d a0 = _mm256_setzero_pd();
    const double* p = base + n;
    for (std::size_t k = 0; k < taps; ++k, --p) a0 = madd(a0, _mm256_broadcast_sd(h + k), _mm256_loadu_pd(p));
    _mm256_storeu_pd(out + n, a0);
  }
  for (; n < count; ++n) {
    const double* newest = base + n;
    double acc = 0.0;
    for (std::size_t k = 0; k < taps; ++k) acc += h[k] * newest[-static_cast<std::ptrdiff_t>(k)];
    out[n] = acc;
  }
}

void axpy_avx2(double a, const double* x, double* y, std::size_t count) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t n = 0;
  for (; n + 8 <= count; n += 8) {
    _mm256_storeu_pd(y + n, madd(_mm256_loadu_pd(y + n), va, _mm256_loadu_pd(x + n)));
    _mm256_storeu_pd(y + n + 4, madd(_mm256_loadu_pd(y + n + 4), va, _mm256_loadu_pd(x + n + 4)));
  }
  for (; n + 4 <= count; n += 4)
    _mm256_storeu_pd(y + n, madd(_mm256_loadu_pd(y + n), va, _mm256_loadu_pd(x + n)));
  for (; n < count; ++n) y[n] += a * x[n];
}

void ramp_axpy_avx2(double g0, double step, const double* x, double* y, std::size_t count) {
  const __m256d vg0 = _mm256_set1_pd(g0);
  const __m256d vstep = _mm256_set1_pd(step);
  const __m256d four = _mm256_set1_pd(4.0);
  __m256d idx = _mm256_setr_pd(1.0, 2.0, 3.0, 4.0);
  std::size_t n = 0;
  for (; n + 4 <= count; n += 4) {
    const __m256d g = _mm256_add_pd(vg0, _mm256_mul_pd(vstep, idx));
    _mm256_storeu_pd(y + n, madd(_mm256_loadu_pd(y + n), g, _mm256_loadu_pd(x + n)));
    idx = _mm256_add_pd(idx, four); // exact for counts below 2^53
  }
  for (; n < count; ++n) {
    const double g = g0 + step * static_cast<double>(n + 1);
    y[n] += g * x[n];
  }
}

void rotate_pair_avx2(double c, double s, double* x, double* y, std::size_t count) {
  const __m256d vc = _mm256_set1_pd(c);
  const __m256d vs = _mm256_set1_pd(s);
  std::size_t n = 0;
  for (; n + 4 <= count; n += 4) {
    const __m256d xn = _mm256_loadu_pd(x + n);
    const __m256d yn = _mm256_loadu_pd(y + n);
    _mm256_storeu_pd(x + n, _mm256_sub_pd(_mm256_mul_pd(vc, xn), _mm256_mul_pd(vs, yn)));
    _mm256_storeu_pd(y + n, _mm256_add_pd(_mm256_mul_pd(vs, xn), _mm256_mul_pd(vc, yn)));
  }
  for (; n < count; ++n) {
    const double xn = x[n];
    const double yn = y[n];
    x[n] = c * xn - s * yn;
    y[n] = s * xn + c * yn;
  }
}

} // namespace

extern const KernelTable kAvx2Table;
const KernelTable kAvx2Table{"avx2", fir_avx2, axpy_avx2, ramp_axpy_avx2, rotate_pair_avx2};

} // namespace spatia::kernels
