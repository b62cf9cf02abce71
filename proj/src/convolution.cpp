#include "spatia/convolution.hpp"

#include <algorithm>
#include <cmath>

#include "spatia/error.hpp"
#include "spatia/kernels.hpp"

namespace spatia {

BlockConvolver::BlockConvolver(std::vector<double> impulse_response) : h_(std::move(impulse_response)) {
  if (h_.empty()) throw ParameterError("impulse response must have at least one tap");
  for (double v : h_)
    if (!std::isfinite(v)) throw ParameterError("impulse response contains non-finite samples");
  work_.assign(h_.size() - 1, 0.0);
}

void BlockConvolver::run(std::span<const double> in) {
  const std::size_t hist = h_.size() - 1;
  work_.resize(hist + in.size());
  std::copy(in.begin(), in.end(), work_.begin() + static_cast<std::ptrdiff_t>(hist));
  scratch_.resize(in.size());
  kernels::active().fir(work_.data(), h_.data(), h_.size(), scratch_.data(), in.size());
  // Keep the last `hist` inputs as history for the next block.
  std::copy(work_.end() - static_cast<std::ptrdiff_t>(hist), work_.end(), work_.begin());
  work_.resize(hist);
}

void BlockConvolver::process(std::span<const double> in, std::span<double> out) {
  if (out.size() != in.size()) throw DimensionError("convolver output block must match the input block");
  run(in);
  std::copy(scratch_.begin(), scratch_.end(), out.begin());
}

void BlockConvolver::process_add(std::span<const double> in, std::span<double> out) {
  if (out.size() != in.size()) throw DimensionError("convolver output block must match the input block");
  run(in);
  for (std::size_t n = 0; n < in.size(); ++n) out[n] += scratch_[n];
}

std::vector<double> BlockConvolver::flush() {
  std::vector<double> tail(h_.size() - 1, 0.0);
  process(tail, tail);
  return tail;
}

void BlockConvolver::reset() { std::fill(work_.begin(), work_.end(), 0.0); }

std::vector<double> convolve(std::span<const double> x, std::span<const double> h) {
  if (x.empty() || h.empty()) return {};
  BlockConvolver conv(std::vector<double>(h.begin(), h.end()));
  std::vector<double> out(x.size());
  conv.process(x, out);
  const auto tail = conv.flush();
  out.insert(out.end(), tail.begin(), tail.end());
  return out;
}

} // namespace spatia
