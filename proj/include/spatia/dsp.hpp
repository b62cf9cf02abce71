#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace spatia {

/// Delay line with linearly interpolated fractional reads.
class FractionalDelayLine {
public:
  /// `max_delay` in samples; reads beyond it are clamped.
  explicit FractionalDelayLine(double max_delay = 0.0);

  /// Pushes one sample and returns the signal delayed by `delay` samples (>= 0).
  double process(double x, double delay);
  void reset();
  double max_delay() const noexcept { return max_delay_; }

private:
  std::vector<double> buffer_;
  std::size_t write_ = 0;
  double max_delay_ = 0.0;
};

/// Whole-buffer delay by `delay` samples (>= 0) with linear interpolation; the
/// output has the input's length and starts from silence.
std::vector<double> delay_signal(std::span<const double> x, double delay);

/// y[n] = (1 - a) x[n] + a y[n-1] with a = exp(-2 pi fc / fs). Unity gain at DC.
class OnePoleLowpass {
public:
  OnePoleLowpass(double cutoff_hz, double sample_rate);
  /// Direct coefficient form; a = 0 is the identity.
  static OnePoleLowpass from_coefficient(double a);

  double process(double x) noexcept {
    state_ = (1.0 - a_) * x + a_ * state_;
    return state_;
  }
  void process(std::span<double> inout) noexcept {
    for (double& v : inout) v = process(v);
  }
  double coefficient() const noexcept { return a_; }
  void reset() noexcept { state_ = 0.0; }

private:
  OnePoleLowpass() = default;
  double a_ = 0.0;
  double state_ = 0.0;
};

} // namespace spatia
