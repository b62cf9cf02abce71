#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace spatia {

/// Streaming FIR filter. Any sequence of block sizes yields the same samples as a
/// single whole-signal convolution (bit-identical, since the per-sample sum order
/// never depends on block boundaries).
class BlockConvolver {
public:
  /// Throws ParameterError for an empty or non-finite impulse response.
  explicit BlockConvolver(std::vector<double> impulse_response);

  std::size_t taps() const noexcept { return h_.size(); }
  /// Filters `in` into `out` (same length). `in` and `out` may alias.
  void process(std::span<const double> in, std::span<double> out);
  /// Adds the filtered block into `out` instead of overwriting it.
  void process_add(std::span<const double> in, std::span<double> out);
  /// Remaining taps() - 1 samples of the response to the input so far (feeds zeros).
  std::vector<double> flush();
  void reset();

private:
  void run(std::span<const double> in);

  std::vector<double> h_;
  std::vector<double> work_;     // [history | block]
  std::vector<double> scratch_;
};

/// Full linear convolution, length x.size() + h.size() - 1.
std::vector<double> convolve(std::span<const double> x, std::span<const double> h);

} // namespace spatia
