#pragma once

#include "spatia/gain_vector.hpp"
#include "spatia/geometry.hpp"

namespace spatia {

/// Rolloff exponent a = R / (20 log10 2) for R dB of attenuation per distance doubling.
double dbap_rolloff_exponent(double rolloff_db);

class DbapConfig {
public:
  /// Throws ParameterError unless rolloff_db > 0 and blur >= 0; LayoutError for an empty layout.
  DbapConfig(LoudspeakerLayout layout, double rolloff_db = 6.0, double spatial_blur = 0.0,
             bool exterior_attenuation = false);

  const LoudspeakerLayout& layout() const noexcept { return layout_; }
  const ConvexHull& hull() const noexcept { return hull_; }
  double rolloff_db() const noexcept { return rolloff_db_; }
  double exponent() const noexcept { return a_; }
  double spatial_blur() const noexcept { return blur_; }
  bool exterior_attenuation() const noexcept { return exterior_attenuation_; }

private:
  LoudspeakerLayout layout_;
  ConvexHull hull_;
  double rolloff_db_;
  double a_;
  double blur_;
  bool exterior_attenuation_;
};

/// sqrt(|speaker - source|^2 + blur^2).
double blurred_distance(Position speaker, Position source, double blur);

struct DbapResult {
  GainVector gains;
  double exterior_distance = 0.0;
  /// Set when the source sits exactly on a speaker with no blur: the limit
  /// (one-hot) gains are returned.
  bool degenerate = false;
};

/// v_i = k / d_i^a with sum v_i^2 = 1.
DbapResult dbap_gains(Position source, const DbapConfig& cfg);

struct ProjectedSource {
  Position effective;
  double exterior_distance = 0.0;
};

/// Interior sources are returned unchanged; exterior ones move to the closest hull point.
ProjectedSource project_exterior_source(Position source, const DbapConfig& cfg);

/// Projection followed by dbap_gains, then 1 / (1 + b)^a scaling when exterior
/// attenuation is enabled.
DbapResult dbap_pan(Position source, const DbapConfig& cfg);

} // namespace spatia
