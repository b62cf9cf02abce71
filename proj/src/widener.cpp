#include "spatia/widener.hpp"

#include <cmath>

#include "spatia/dsp.hpp"

namespace spatia {

void WidenerParams::validate(double sample_rate) const {
  const double all[] = {side_gain, crossfeed_gain, crossfeed_cutoff_hz, reflection_delay_s, reflection_gain,
                        reflection_cutoff_hz};
  for (double v : all)
    if (!std::isfinite(v)) throw ParameterError("widener parameters must be finite");
  if (!(sample_rate > 0.0)) throw ParameterError("sample rate must be positive");
  if (side_gain < 0.0) throw ParameterError("side_gain must be >= 0");
  if (crossfeed_gain < 0.0 || crossfeed_gain > 1.0) throw ParameterError("crossfeed_gain must lie in [0, 1]");
  if (reflection_gain < 0.0 || reflection_gain >= 1.0) throw ParameterError("reflection_gain must lie in [0, 1)");
  if (reflection_delay_s < 0.0) throw ParameterError("reflection_delay must be >= 0");
  if (!(crossfeed_cutoff_hz > 0.0) || !(reflection_cutoff_hz > 0.0))
    throw ParameterError("low-pass cutoffs must be positive");
}

StereoSignal stereo_widen(const StereoSignal& in, const WidenerParams& p, double sample_rate) {
  p.validate(sample_rate);
  if (in.left.size() != in.right.size()) throw DimensionError("left and right channels differ in length");
  StereoSignal out = in;
  const std::size_t n = out.left.size();

  if (p.side_gain != 1.0) {
    for (std::size_t i = 0; i < n; ++i) {
      const double mid = (out.left[i] + out.right[i]) / 2.0;
      const double side = p.side_gain * ((out.left[i] - out.right[i]) / 2.0);
      out.left[i] = mid + side;
      out.right[i] = mid - side;
    }
  }

  if (p.crossfeed_gain != 0.0) {
    OnePoleLowpass to_left(p.crossfeed_cutoff_hz, sample_rate), to_right(p.crossfeed_cutoff_hz, sample_rate);
    for (std::size_t i = 0; i < n; ++i) {
      const double l = out.left[i], r = out.right[i];
      out.left[i] = l + p.crossfeed_gain * to_left.process(r);
      out.right[i] = r + p.crossfeed_gain * to_right.process(l);
    }
  }

  if (p.reflection_gain != 0.0) {
    const double delay = p.reflection_delay_s * sample_rate;
    for (auto* ch : {&out.left, &out.right}) {
      auto echo = delay_signal(*ch, delay);
      OnePoleLowpass(p.reflection_cutoff_hz, sample_rate).process(echo);
      for (std::size_t i = 0; i < n; ++i) (*ch)[i] += p.reflection_gain * echo[i];
    }
  }
  return out;
}

} // namespace spatia
