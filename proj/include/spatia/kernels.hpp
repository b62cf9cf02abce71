#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

namespace spatia::kernels {

/// Inner loops shared by the convolution, decoding and mixing paths.
///
/// Every variant accumulates in exactly the same order as the scalar reference
/// (no reassociation, no fused multiply-add), so results are bit-identical
/// across variants. Pointers may be unaligned; output ranges must not overlap inputs.
struct KernelTable {
  const char* name;

  /// out[n] = sum_{k<taps} h[k] * x[n + taps - 1 - k] for n < count.
  /// `x` holds taps - 1 samples of history followed by `count` new samples.
  void (*fir)(const double* x, const double* h, std::size_t taps, double* out, std::size_t count);

  /// y[n] += a * x[n].
  void (*axpy)(double a, const double* x, double* y, std::size_t count);

  /// y[n] += (g0 + step * (n + 1)) * x[n]: linear gain ramp ending at g0 + step * count.
  void (*ramp_axpy)(double g0, double step, const double* x, double* y, std::size_t count);

  /// (x, y) <- (c x - s y, s x + c y), elementwise.
  void (*rotate_pair)(double c, double s, double* x, double* y, std::size_t count);
};

const KernelTable& scalar();
/// nullptr unless the AVX2 variant was compiled in and the CPU supports it.
const KernelTable* avx2();
/// nullptr unless running on an aarch64 build.
const KernelTable* neon();

/// Kernel table used by the library. Chosen once per process: the best supported
/// variant, unless the SPATIA_KERNELS environment variable names one
/// ("scalar", "avx2", "neon").
const KernelTable& active();

/// Every variant usable on this machine, scalar first.
std::vector<const KernelTable*> available();

} // namespace spatia::kernels
