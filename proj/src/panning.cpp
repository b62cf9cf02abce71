#include "spatia/panning.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <string>

namespace spatia {

namespace {

constexpr double kAngleSlack = 1e-12;

void check_half_angle(double half_angle) {
  if (!(half_angle > 0.0 && half_angle < kPi / 2.0))
    throw ParameterError("half angle must lie in (0, pi/2)");
}

GainVector pair_gains(double r, Normalization norm) {
  // (g1 - g2) / (g1 + g2) = r with g1 on the positive side.
  const double a = 1.0 + r;
  const double b = 1.0 - r;
  const double scale = norm == Normalization::UnitPower ? std::sqrt(a * a + b * b) : a + b;
  return GainVector({a / scale, b / scale});
}

} // namespace

GainVector tangent_law_gains(double target_azimuth, double half_angle, Normalization norm) {
  check_half_angle(half_angle);
  if (!std::isfinite(target_azimuth) || std::abs(target_azimuth) > half_angle + kAngleSlack)
    throw OutOfRangeError("target azimuth " + std::to_string(rad_to_deg(target_azimuth)) +
                          " deg lies outside the pair's +/-" + std::to_string(rad_to_deg(half_angle)) +
                          " deg span");
  const double r = std::clamp(std::tan(target_azimuth) / std::tan(half_angle), -1.0, 1.0);
  return pair_gains(r, norm);
}

GainVector delay_pan(double target_azimuth, double half_angle, double max_delay) {
  check_half_angle(half_angle);
  if (!(max_delay >= 0.0)) throw ParameterError("max_delay must be non-negative");
  if (!std::isfinite(target_azimuth) || std::abs(target_azimuth) > half_angle + kAngleSlack)
    throw OutOfRangeError("target azimuth outside the delay panner's span");
  GainVector out({std::sqrt(0.5), std::sqrt(0.5)});
  const double delay = max_delay * std::min(1.0, std::abs(target_azimuth) / half_angle);
  if (target_azimuth > 0.0)
    out.delays[1] = delay;
  else if (target_azimuth < 0.0)
    out.delays[0] = delay;
  return out;
}

PairwiseRing::PairwiseRing(LoudspeakerLayout layout) : layout_(std::move(layout)) {
  const std::size_t n = layout_.size();
  if (n < 3) throw LayoutError("pair-wise ring needs at least 3 speakers to cover the circle");
  if (!layout_.is_horizontal()) throw LayoutError("pair-wise ring speakers must lie on the horizontal plane");
  if (!layout_.is_equidistant()) throw LayoutError("pair-wise ring speakers must be equidistant");
  for (const auto& d : layout_.directions()) azimuths_.push_back(d.azimuth());

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return azimuths_[a] < azimuths_[b]; });
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t a = order[k];
    const std::size_t b = order[(k + 1) % n];
    double gap = azimuths_[b] - azimuths_[a];
    if (k + 1 == n) gap += 2.0 * kPi;
    if (!(gap > 0.0)) throw LayoutError("pair-wise ring has coincident speaker azimuths");
    if (gap >= kPi) throw LayoutError("pair-wise ring leaves a gap of 180 degrees or more");
    pairs_.emplace_back(a, b);
  }
}

std::size_t PairwiseRing::enclosing_pair(double azimuth) const {
  std::size_t best = 0;
  double best_excess = std::numeric_limits<double>::infinity();
  for (std::size_t p = 0; p < pairs_.size(); ++p) {
    const auto [a, b] = pairs_[p];
    double gap = azimuths_[b] - azimuths_[a];
    if (gap <= 0.0) gap += 2.0 * kPi;
    double offset = azimuth - azimuths_[a];
    offset -= 2.0 * kPi * std::floor(offset / (2.0 * kPi));
    if (offset <= gap) return p;
    // Rounding can leave a target a hair past the last pair's end; keep the closest.
    const double excess = std::min(offset - gap, 2.0 * kPi - offset);
    if (excess < best_excess) {
      best_excess = excess;
      best = p;
    }
  }
  return best;
}

GainVector ring_pan(double target_azimuth, const PairwiseRing& ring, Normalization norm) {
  if (!std::isfinite(target_azimuth)) throw ParameterError("target azimuth must be finite");
  const std::size_t n = ring.layout().size();
  GainVector out(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (std::abs(wrap_angle(target_azimuth - ring.azimuth(i))) <= kAngleSlack) {
      out.gains[i] = 1.0;
      return out;
    }
  }
  const auto [a, b] = ring.pairs()[ring.enclosing_pair(target_azimuth)];
  double gap = ring.azimuth(b) - ring.azimuth(a);
  if (gap <= 0.0) gap += 2.0 * kPi;
  const double half = gap / 2.0;
  const double centre = ring.azimuth(a) + half;
  const double local = std::clamp(wrap_angle(target_azimuth - centre), -half, half);
  const GainVector pair = tangent_law_gains(local, half, norm);
  out.gains[b] = pair.gains[0];
  out.gains[a] = pair.gains[1];
  return out;
}

double amplitude_difference_to_position(double delta_db, double half_angle) {
  check_half_angle(half_angle);
  if (std::isnan(delta_db) || delta_db < 0.0) throw ParameterError("level difference must be >= 0 dB");
  if (std::isinf(delta_db)) return half_angle;
  const double ratio = std::pow(10.0, delta_db / 20.0);
  const double r = (ratio - 1.0) / (ratio + 1.0);
  return std::min(half_angle, std::atan(r * std::tan(half_angle)));
}

} // namespace spatia
