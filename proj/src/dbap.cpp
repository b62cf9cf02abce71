#include "spatia/dbap.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace spatia {

double dbap_rolloff_exponent(double rolloff_db) {
  if (!(rolloff_db > 0.0) || !std::isfinite(rolloff_db)) throw ParameterError("rolloff R must be positive (dB)");
  return rolloff_db / (20.0 * std::log10(2.0));
}

DbapConfig::DbapConfig(LoudspeakerLayout layout, double rolloff_db, double spatial_blur, bool exterior_attenuation)
    : layout_(std::move(layout)), rolloff_db_(rolloff_db), a_(dbap_rolloff_exponent(rolloff_db)),
      blur_(spatial_blur), exterior_attenuation_(exterior_attenuation) {
  if (!(blur_ >= 0.0) || !std::isfinite(blur_)) throw ParameterError("spatial blur must be >= 0");
  if (layout_.size() == 0) throw LayoutError("DBAP needs at least one speaker");
  for (const auto& s : layout_.speakers)
    if (!is_finite(s)) throw LayoutError("speaker positions must be finite");
  hull_ = convex_hull_any(layout_.speakers);
}

double blurred_distance(Position speaker, Position source, double blur) {
  const Vec3 d = speaker - source;
  return std::sqrt(d.x * d.x + d.y * d.y + d.z * d.z + blur * blur);
}

DbapResult dbap_gains(Position source, const DbapConfig& cfg) {
  if (!is_finite(source)) throw ParameterError("source position must be finite");
  const auto& spk = cfg.layout().speakers;
  const std::size_t n = spk.size();
  DbapResult res;
  res.gains = GainVector(n);

  std::vector<double> d(n);
  for (std::size_t i = 0; i < n; ++i) d[i] = blurred_distance(spk[i], source, cfg.spatial_blur());
  const auto nearest = static_cast<std::size_t>(std::min_element(d.begin(), d.end()) - d.begin());
  const double dmin = d[nearest];
  if (dmin == 0.0) {
    res.gains.gains[nearest] = 1.0;
    res.degenerate = true;
    return res;
  }
  // Scale by the nearest distance so the powers stay in [0, 1].
  double sq = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double w = std::pow(dmin / d[i], cfg.exponent());
    res.gains.gains[i] = w;
    sq += w * w;
  }
  const double k = 1.0 / std::sqrt(sq);
  for (double& g : res.gains.gains) g *= k;
  return res;
}

ProjectedSource project_exterior_source(Position source, const DbapConfig& cfg) {
  if (!is_finite(source)) throw ParameterError("source position must be finite");
  const auto [p, dist] = closest_point_on_hull(cfg.hull(), source);
  if (dist == 0.0) return {source, 0.0};
  return {p, dist};
}

DbapResult dbap_pan(Position source, const DbapConfig& cfg) {
  const auto proj = project_exterior_source(source, cfg);
  DbapResult res = dbap_gains(proj.effective, cfg);
  res.exterior_distance = proj.exterior_distance;
  if (cfg.exterior_attenuation() && proj.exterior_distance > 0.0) {
    const double att = std::pow(1.0 + proj.exterior_distance, -cfg.exponent());
    for (double& g : res.gains.gains) g *= att;
  }
  return res;
}

} // namespace spatia
