#include "spatia/dsp.hpp"

#include <algorithm>
#include <cmath>

#include "spatia/error.hpp"
#include "spatia/geometry.hpp"

namespace spatia {

FractionalDelayLine::FractionalDelayLine(double max_delay) {
  if (!(max_delay >= 0.0) || !std::isfinite(max_delay)) throw ParameterError("delay must be a finite value >= 0");
  max_delay_ = max_delay;
  buffer_.assign(static_cast<std::size_t>(std::ceil(max_delay)) + 2, 0.0);
}

double FractionalDelayLine::process(double x, double delay) {
  const std::size_t size = buffer_.size();
  buffer_[write_] = x;
  const double d = std::clamp(delay, 0.0, max_delay_);
  const auto whole = static_cast<std::size_t>(d);
  const double frac = d - static_cast<double>(whole);
  const std::size_t i0 = (write_ + size - whole) % size;
  double y = buffer_[i0];
  if (frac > 0.0) {
    const std::size_t i1 = (i0 + size - 1) % size;
    y = (1.0 - frac) * y + frac * buffer_[i1];
  }
  write_ = (write_ + 1) % size;
  return y;
}

void FractionalDelayLine::reset() {
  std::fill(buffer_.begin(), buffer_.end(), 0.0);
  write_ = 0;
}

std::vector<double> delay_signal(std::span<const double> x, double delay) {
  FractionalDelayLine line(delay);
  std::vector<double> out(x.size());
  for (std::size_t n = 0; n < x.size(); ++n) out[n] = line.process(x[n], delay);
  return out;
}

OnePoleLowpass::OnePoleLowpass(double cutoff_hz, double sample_rate) {
  if (!(sample_rate > 0.0)) throw ParameterError("sample rate must be positive");
  if (!(cutoff_hz > 0.0)) throw ParameterError("low-pass cutoff must be positive");
  a_ = std::exp(-2.0 * kPi * cutoff_hz / sample_rate);
}

OnePoleLowpass OnePoleLowpass::from_coefficient(double a) {
  if (!(a >= 0.0 && a < 1.0)) throw ParameterError("one-pole coefficient must lie in [0, 1)");
  OnePoleLowpass lp;
  lp.a_ = a;
  return lp;
}

} // namespace spatia
