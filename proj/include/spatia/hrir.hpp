#pragma once

#include <filesystem>
#include <optional>
#include <vector>

#include "spatia/geometry.hpp"

namespace spatia {

struct Hrir {
  Direction direction;
  std::vector<double> left;
  std::vector<double> right;
  /// Empty for far-field responses, otherwise the measurement distance in metres.
  std::optional<double> near_field_distance;

  std::size_t taps() const noexcept { return left.size(); }
  /// Throws ParameterError for empty, unequal-length or non-finite responses.
  void validate() const;
};

class HrirSet {
public:
  /// Throws ParameterError for an empty set, duplicate directions, invalid entries,
  /// or (with symmetric_head) a missing or unequal mirror entry.
  HrirSet(std::vector<Hrir> entries, bool symmetric_head = false, double azimuth_step = 0.0,
          double elevation_step = 0.0);

  const std::vector<Hrir>& entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }
  bool symmetric_head() const noexcept { return symmetric_; }
  double azimuth_step() const noexcept { return az_step_; }
  double elevation_step() const noexcept { return el_step_; }
  /// Longest response in the set.
  std::size_t taps() const noexcept;

private:
  std::vector<Hrir> entries_;
  bool symmetric_;
  double az_step_;
  double el_step_;
};

/// Entry with the smallest great-circle distance to `d`; ties go to the smaller
/// azimuth, then the smaller elevation.
const Hrir& nearest_hrir(const HrirSet& set, const Direction& d);

inline constexpr double kDefaultHeadRadius = 0.0875;

/// Woodworth interaural time difference for a source at `d`.
double woodworth_itd(const Direction& d, double head_radius = kDefaultHeadRadius);

/// Spherical-head model: one delayed impulse per ear, the far ear delayed by the
/// Woodworth ITD (fractional delays split across two taps) and low-passed to
/// mimic head shadow.
Hrir synthesize_spherical_head_hrir(const Direction& d, double sample_rate, std::size_t taps = 256,
                                    double head_radius = kDefaultHeadRadius);

/// Symmetric grid of synthetic responses. elevation_step_deg = 0 gives a
/// horizontal-only set.
HrirSet synthesize_spherical_head_set(double azimuth_step_deg, double elevation_step_deg, double sample_rate,
                                      std::size_t taps = 256, double head_radius = kDefaultHeadRadius);

/// Index document {"sample_rate", "symmetric_head", "azimuth_step_deg",
/// "elevation_step_deg", "entries": [{"az_deg", "el_deg", "distance": "far" | metres,
/// "left", "right"}]} where left/right are mono WAV paths relative to the index.
HrirSet load_hrir_set(const std::filesystem::path& index, double* sample_rate = nullptr);
void save_hrir_set(const HrirSet& set, double sample_rate, const std::filesystem::path& index);

} // namespace spatia
