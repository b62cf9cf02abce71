#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "spatia/ambisonics.hpp"
#include "spatia/gain_vector.hpp"
#include "spatia/geometry.hpp"

namespace spatia {

enum class Algorithm { StereoTangent, StereoDelay, RingPairwise, Ambisonics, Vbap, Dbap };

std::string_view to_string(Algorithm a) noexcept;
/// "stereo-tangent", "stereo-delay", "ring-pairwise", "ambisonics", "vbap", "dbap".
Algorithm parse_algorithm(std::string_view s);

struct AlgorithmConfig {
  Algorithm type = Algorithm::Vbap;
  // stereo-tangent / stereo-delay
  double half_angle = deg_to_rad(30.0);
  double max_delay = 0.002;
  Normalization normalization = Normalization::UnitPower;
  // ambisonics
  int horizontal_order = 1;
  int periphonic_order = 1;
  DecoderFlavour decoder = DecoderFlavour::Projection;
  bool delay_compensation = false;
  std::optional<double> reference_distance; ///< enables 1/r distance gain when set
  // vbap
  int dimensionality = 2;
  double power = 1.0;
  // dbap
  double rolloff_db = 6.0;
  double blur = 0.0;
  bool exterior_attenuation = false;
};

enum class OutputMode { Speakers, Binaural, Ambisonics };
std::string_view to_string(OutputMode m) noexcept;

struct OutputConfig {
  OutputMode mode = OutputMode::Speakers;
  /// HRIR index file; empty selects synthetic spherical-head responses.
  std::filesystem::path hrir_index;
  std::size_t hrir_taps = 256;
  /// Virtual speakers for binaural Ambisonics; defaults to a ring or the cube.
  std::optional<LoudspeakerLayout> virtual_layout;
};

struct AudioSpec {
  enum class Kind { Sine, Noise, Impulse, File };
  Kind kind = Kind::Sine;
  double frequency = 440.0;
  double amplitude = 1.0;
  std::uint64_t seed = 0;
  double at = 0.0; ///< impulse time in seconds
  std::filesystem::path path;
};

/// Either a direction (azimuth/elevation in radians, not wrapped, so a sweep from
/// 0 to 2 pi circles once) with a distance, or a Cartesian position.
struct Keyframe {
  double t = 0.0;
  bool has_position = false;
  double azimuth = 0.0;
  double elevation = 0.0;
  double distance = 1.0;
  Position position{};
  double gain = 1.0;
};

enum class Interpolation { Hold, Linear };

struct Source {
  std::string name;
  AudioSpec audio;
  std::vector<Keyframe> keyframes;
  Interpolation interpolation = Interpolation::Linear;
};

struct YawKeyframe {
  double t = 0.0;
  double yaw = 0.0; ///< radians, counterclockwise-positive
};

struct Scene {
  double sample_rate = 48000.0;
  double duration = 1.0;
  std::size_t block_size = 256;
  /// Evaluate coefficients per sample instead of per block.
  bool precise = false;
  AlgorithmConfig algorithm;
  std::optional<LoudspeakerLayout> layout;
  OutputConfig output;
  std::vector<Source> sources;
  std::vector<YawKeyframe> head_yaw;

  std::size_t frames() const;
};

/// Relative file references resolve against `base_dir`. Structural problems
/// (missing fields, wrong types, unknown names) raise ValidationError.
Scene scene_from_json(const nlohmann::json& doc, const std::filesystem::path& base_dir = {});
Scene load_scene(const std::filesystem::path& path);

/// Every problem found, with dotted locations such as "sources[1].keyframes[0].t".
ValidationReport validate_scene(const Scene& scene);

struct SourceState {
  Direction direction;
  Position position;
  double distance = 1.0;
  double gain = 1.0;
};

/// Trajectory value at time t (held before the first and after the last keyframe).
SourceState evaluate_trajectory(const Source& source, double t);

/// Piecewise-linear head yaw, 0 without a track.
double evaluate_head_yaw(const std::vector<YawKeyframe>& track, double t);

} // namespace spatia
