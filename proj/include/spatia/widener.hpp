#pragma once

#include "spatia/binaural.hpp"

namespace spatia {

struct WidenerParams {
  double side_gain = 1.4;
  double crossfeed_gain = 0.3;
  double crossfeed_cutoff_hz = 700.0;
  double reflection_delay_s = 0.008;
  double reflection_gain = 0.25;
  double reflection_cutoff_hz = 4000.0;

  /// side_gain 1, no crossfeed, no reflection.
  static WidenerParams identity() { return {1.0, 0.0, 700.0, 0.008, 0.0, 4000.0}; }
  /// Throws ParameterError for out-of-range or non-finite values.
  void validate(double sample_rate) const;
};

/// Mid/side width, low-passed crossfeed, then a delayed low-passed reflection, in
/// that order. Stages at their neutral setting are skipped entirely.
StereoSignal stereo_widen(const StereoSignal& in, const WidenerParams& params, double sample_rate);

} // namespace spatia
