#pragma once

#include <cstddef>
#include <vector>

namespace spatia {

/// Per-loudspeaker amplitude factors and delays (seconds) produced by a panner.
/// Amplitude-only panners leave every delay at zero.
struct GainVector {
  std::vector<double> gains;
  std::vector<double> delays;

  GainVector() = default;
  explicit GainVector(std::size_t n) : gains(n, 0.0), delays(n, 0.0) {}
  GainVector(std::vector<double> g) : gains(std::move(g)), delays(gains.size(), 0.0) {}

  std::size_t size() const noexcept { return gains.size(); }
  /// Sum of squared gains.
  double power() const noexcept {
    double p = 0.0;
    for (double g : gains) p += g * g;
    return p;
  }
  bool has_delays() const noexcept {
    for (double d : delays)
      if (d != 0.0) return true;
    return false;
  }
};

enum class Normalization {
  UnitPower,     ///< sum of g^2 == 1
  UnitAmplitude, ///< sum of g == 1
};

} // namespace spatia
