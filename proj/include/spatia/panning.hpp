#pragma once

#include <utility>
#include <vector>

#include "spatia/gain_vector.hpp"
#include "spatia/geometry.hpp"

namespace spatia {

/// Stereo pair gains from the tangent law.
///
/// Channel 0 is the speaker at +half_angle (left), channel 1 the one at -half_angle.
/// Throws OutOfRangeError when |target_azimuth| > half_angle and ParameterError
/// unless 0 < half_angle < pi/2.
GainVector tangent_law_gains(double target_azimuth, double half_angle,
                             Normalization norm = Normalization::UnitPower);

/// Equal-gain delay panning: the far-side channel is delayed in proportion to
/// |target| / half_angle, reaching max_delay at the speaker. Channel order as above.
GainVector delay_pan(double target_azimuth, double half_angle, double max_delay = 0.002);

/// Horizontal equal-radius layout with its speakers paired by azimuth adjacency.
class PairwiseRing {
public:
  /// Throws LayoutError if the layout is not horizontal, not equidistant, has fewer
  /// than 3 speakers, or leaves a gap of pi or more between neighbours.
  explicit PairwiseRing(LoudspeakerLayout layout);

  const LoudspeakerLayout& layout() const noexcept { return layout_; }
  /// Adjacent pairs (clockwise end, counterclockwise end), ordered by azimuth.
  const std::vector<std::pair<std::size_t, std::size_t>>& pairs() const noexcept { return pairs_; }
  double azimuth(std::size_t speaker) const { return azimuths_.at(speaker); }
  /// Index into pairs() of the pair whose arc contains `azimuth`.
  std::size_t enclosing_pair(double azimuth) const;

private:
  LoudspeakerLayout layout_;
  std::vector<double> azimuths_;
  std::vector<std::pair<std::size_t, std::size_t>> pairs_;
};

/// Pair-wise tangent-law panning on a ring. Exactly the two speakers of the
/// enclosing pair receive gain; a target on a speaker gives that speaker gain 1.
GainVector ring_pan(double target_azimuth, const PairwiseRing& ring,
                    Normalization norm = Normalization::UnitPower);

/// Phantom-source azimuth predicted by the tangent law for a level difference of
/// `delta_db` between the two channels. +infinity maps to half_angle.
double amplitude_difference_to_position(double delta_db, double half_angle);

} // namespace spatia
