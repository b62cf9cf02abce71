#include "spatia/scene.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "spatia/dbap.hpp"
#include "spatia/layout_io.hpp"
#include "spatia/panning.hpp"
#include "spatia/vbap.hpp"

namespace spatia {

using nlohmann::json;

std::string_view to_string(Algorithm a) noexcept {
  switch (a) {
  case Algorithm::StereoTangent: return "stereo-tangent";
  case Algorithm::StereoDelay: return "stereo-delay";
  case Algorithm::RingPairwise: return "ring-pairwise";
  case Algorithm::Ambisonics: return "ambisonics";
  case Algorithm::Vbap: return "vbap";
  case Algorithm::Dbap: return "dbap";
  }
  return "?";
}

Algorithm parse_algorithm(std::string_view s) {
  for (auto a : {Algorithm::StereoTangent, Algorithm::StereoDelay, Algorithm::RingPairwise, Algorithm::Ambisonics,
                 Algorithm::Vbap, Algorithm::Dbap})
    if (to_string(a) == s) return a;
  throw ParameterError("unknown algorithm '" + std::string(s) + "'");
}

std::string_view to_string(OutputMode m) noexcept {
  switch (m) {
  case OutputMode::Speakers: return "speakers";
  case OutputMode::Binaural: return "binaural";
  case OutputMode::Ambisonics: return "ambisonics";
  }
  return "?";
}

std::size_t Scene::frames() const {
  return static_cast<std::size_t>(std::llround(duration * sample_rate));
}

namespace {

// Collects schema problems instead of stopping at the first one.
class Reader {
public:
  ValidationReport report;

  template <typename T>
  T get(const json& obj, const char* key, const std::string& where, T fallback, bool required = false) {
    const auto it = obj.find(key);
    if (it == obj.end()) {
      if (required) report.add("schema", join(where, key), std::string("missing required field '") + key + "'");
      return fallback;
    }
    try {
      return it->template get<T>();
    } catch (const json::exception&) {
      report.add("schema", join(where, key), std::string("field '") + key + "' has the wrong type");
      return fallback;
    }
  }

  static std::string join(const std::string& where, const std::string& key) {
    return where.empty() ? key : where + "." + key;
  }
};

LoudspeakerLayout read_layout(const json& v, const std::filesystem::path& base, Reader& r, const std::string& where) {
  try {
    if (v.is_string()) {
      const auto s = v.get<std::string>();
      if (s.rfind("preset:", 0) == 0) return load_layout(s);
      const auto presets = layouts::preset_names();
      if (std::find(presets.begin(), presets.end(), s) != presets.end()) return layouts::preset(s);
      return load_layout(base / s);
    }
    if (v.is_object()) return layout_from_json(v);
    r.report.add("schema", where, "layout must be a preset name, a file path or an object");
  } catch (const Error& e) {
    r.report.add(e.code(), where, e.what());
  }
  return {};
}

Normalization parse_normalization(const std::string& s) {
  if (s == "unit-power") return Normalization::UnitPower;
  if (s == "unit-amplitude") return Normalization::UnitAmplitude;
  throw ParameterError("unknown normalization '" + s + "'");
}

AlgorithmConfig read_algorithm(const json& v, Reader& r) {
  AlgorithmConfig a;
  const json obj = v.is_string() ? json{{"type", v}} : v;
  if (!obj.is_object()) {
    r.report.add("schema", "algorithm", "algorithm must be a name or an object");
    return a;
  }
  const std::string w = "algorithm";
  try {
    a.type = parse_algorithm(r.get<std::string>(obj, "type", w, "vbap", true));
  } catch (const Error& e) {
    r.report.add("schema", "algorithm.type", e.what());
  }
  a.half_angle = deg_to_rad(r.get<double>(obj, "half_angle_deg", w, 30.0));
  a.max_delay = r.get<double>(obj, "max_delay_s", w, 0.002);
  try {
    a.normalization = parse_normalization(r.get<std::string>(obj, "normalization", w, "unit-power"));
  } catch (const Error& e) {
    r.report.add("schema", "algorithm.normalization", e.what());
  }
  a.horizontal_order = r.get<int>(obj, "H", w, 1);
  a.periphonic_order = r.get<int>(obj, "P", w, a.horizontal_order);
  try {
    a.decoder = parse_decoder_flavour(r.get<std::string>(obj, "decoder", w, "projection"));
  } catch (const Error& e) {
    r.report.add("schema", "algorithm.decoder", e.what());
  }
  a.delay_compensation = r.get<bool>(obj, "delay_compensation", w, false);
  if (obj.contains("reference_distance")) a.reference_distance = r.get<double>(obj, "reference_distance", w, 1.0);
  a.dimensionality = r.get<int>(obj, "dimensionality", w, 2);
  a.power = r.get<double>(obj, "power", w, 1.0);
  a.rolloff_db = r.get<double>(obj, "rolloff_db", w, 6.0);
  a.blur = r.get<double>(obj, "blur", w, 0.0);
  a.exterior_attenuation = r.get<bool>(obj, "exterior_attenuation", w, false);
  return a;
}

OutputConfig read_output(const json& v, const std::filesystem::path& base, Reader& r) {
  OutputConfig o;
  const json obj = v.is_string() ? json{{"mode", v}} : v;
  if (!obj.is_object()) {
    r.report.add("schema", "output", "output must be a mode name or an object");
    return o;
  }
  const auto mode = r.get<std::string>(obj, "mode", "output", "speakers");
  if (mode == "speakers") o.mode = OutputMode::Speakers;
  else if (mode == "binaural") o.mode = OutputMode::Binaural;
  else if (mode == "ambisonics") o.mode = OutputMode::Ambisonics;
  else r.report.add("schema", "output.mode", "unknown output mode '" + mode + "'");
  const auto hrir = r.get<std::string>(obj, "hrir", "output", "");
  if (!hrir.empty() && hrir != "synthetic") o.hrir_index = base / hrir;
  o.hrir_taps = r.get<std::size_t>(obj, "hrir_taps", "output", 256);
  if (obj.contains("virtual_layout")) o.virtual_layout = read_layout(obj["virtual_layout"], base, r, "output.virtual_layout");
  return o;
}

Keyframe read_keyframe(const json& k, Reader& r, const std::string& w) {
  Keyframe f;
  f.t = r.get<double>(k, "t", w, 0.0);
  f.gain = r.get<double>(k, "gain", w, 1.0);
  if (k.contains("position")) {
    const auto p = r.get<std::vector<double>>(k, "position", w, {0, 0, 0});
    if (p.size() != 3) r.report.add("schema", Reader::join(w, "position"), "position needs three coordinates");
    else f.position = {p[0], p[1], p[2]};
    f.has_position = true;
  } else {
    f.azimuth = deg_to_rad(r.get<double>(k, "az_deg", w, 0.0, true));
    f.elevation = deg_to_rad(r.get<double>(k, "el_deg", w, 0.0));
    f.distance = r.get<double>(k, "dist_m", w, 1.0);
  }
  return f;
}

Source read_source(const json& s, const std::filesystem::path& base, Reader& r, const std::string& w) {
  Source src;
  src.name = r.get<std::string>(s, "name", w, w);
  const auto interp = r.get<std::string>(s, "interpolation", w, "linear");
  if (interp == "linear") src.interpolation = Interpolation::Linear;
  else if (interp == "hold") src.interpolation = Interpolation::Hold;
  else r.report.add("schema", Reader::join(w, "interpolation"), "interpolation must be 'linear' or 'hold'");

  const json audio = s.value("audio", json{{"type", "noise"}});
  const std::string aw = Reader::join(w, "audio");
  const auto type = r.get<std::string>(audio, "type", aw, "noise");
  auto& a = src.audio;
  if (type == "sine") a.kind = AudioSpec::Kind::Sine;
  else if (type == "noise") a.kind = AudioSpec::Kind::Noise;
  else if (type == "impulse") a.kind = AudioSpec::Kind::Impulse;
  else if (type == "file") a.kind = AudioSpec::Kind::File;
  else r.report.add("schema", Reader::join(aw, "type"), "unknown audio type '" + type + "'");
  a.frequency = r.get<double>(audio, "frequency", aw, 440.0);
  a.amplitude = r.get<double>(audio, "amplitude", aw, a.kind == AudioSpec::Kind::Sine ? 0.5 : 0.25);
  a.seed = r.get<std::uint64_t>(audio, "seed", aw, 0);
  a.at = r.get<double>(audio, "at", aw, 0.0);
  if (a.kind == AudioSpec::Kind::File) a.path = base / r.get<std::string>(audio, "path", aw, "", true);

  if (s.contains("keyframes")) {
    const auto& ks = s["keyframes"];
    if (!ks.is_array()) {
      r.report.add("schema", Reader::join(w, "keyframes"), "keyframes must be an array");
    } else {
      for (std::size_t i = 0; i < ks.size(); ++i)
        src.keyframes.push_back(read_keyframe(ks[i], r, w + ".keyframes[" + std::to_string(i) + "]"));
    }
  } else if (s.contains("az_deg") || s.contains("position")) {
    src.keyframes.push_back(read_keyframe(s, r, w));
  } else {
    r.report.add("schema", w, "source needs 'keyframes' or a static 'az_deg' / 'position'");
  }
  return src;
}

} // namespace

Scene scene_from_json(const json& doc, const std::filesystem::path& base_dir) {
  Reader r;
  Scene scene;
  if (!doc.is_object()) {
    r.report.add("schema", "", "scene must be a JSON object");
    throw ValidationError(r.report);
  }
  scene.sample_rate = r.get<double>(doc, "sample_rate", "", 48000.0);
  scene.duration = r.get<double>(doc, "duration", "", 1.0, true);
  scene.block_size = r.get<std::size_t>(doc, "block_size", "", 256);
  scene.precise = r.get<bool>(doc, "precise", "", false);
  if (doc.contains("algorithm")) scene.algorithm = read_algorithm(doc["algorithm"], r);
  else r.report.add("schema", "algorithm", "missing required field 'algorithm'");
  if (doc.contains("layout")) scene.layout = read_layout(doc["layout"], base_dir, r, "layout");
  if (doc.contains("output")) scene.output = read_output(doc["output"], base_dir, r);
  if (doc.contains("head_yaw")) {
    const auto& ys = doc["head_yaw"];
    if (!ys.is_array()) {
      r.report.add("schema", "head_yaw", "head_yaw must be an array of {t, yaw_deg}");
    } else {
      for (std::size_t i = 0; i < ys.size(); ++i) {
        const std::string w = "head_yaw[" + std::to_string(i) + "]";
        scene.head_yaw.push_back({r.get<double>(ys[i], "t", w, 0.0, true),
                                  deg_to_rad(r.get<double>(ys[i], "yaw_deg", w, 0.0, true))});
      }
    }
  }
  const auto& srcs = doc.contains("sources") ? doc["sources"] : json::array();
  if (!srcs.is_array()) {
    r.report.add("schema", "sources", "sources must be an array");
  } else {
    for (std::size_t i = 0; i < srcs.size(); ++i) {
      if (!srcs[i].is_object()) {
        r.report.add("schema", "sources[" + std::to_string(i) + "]", "source must be an object");
        continue;
      }
      scene.sources.push_back(read_source(srcs[i], base_dir, r, "sources[" + std::to_string(i) + "]"));
    }
  }
  if (!r.report.ok()) throw ValidationError(r.report);
  return scene;
}

Scene load_scene(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open scene '" + path.string() + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    ValidationReport rep;
    rep.add("schema", "", std::string("scene is not valid JSON: ") + e.what());
    throw ValidationError(rep);
  }
  return scene_from_json(doc, path.parent_path());
}

namespace {

bool is_direction_based(Algorithm a) { return a != Algorithm::Dbap; }

void check_layout(const Scene& s, ValidationReport& rep) {
  const auto& a = s.algorithm;
  const bool stereo = a.type == Algorithm::StereoTangent || a.type == Algorithm::StereoDelay;
  if (stereo) {
    if (s.layout) rep.add("layout_not_used", "layout", "stereo algorithms use half_angle_deg instead of a layout");
    if (!(a.half_angle > 0.0 && a.half_angle < kPi / 2))
      rep.add("parameter", "algorithm.half_angle_deg", "half angle must lie in (0, 90) degrees");
    if (a.type == Algorithm::StereoDelay && !(a.max_delay >= 0.0 && a.max_delay <= 0.1))
      rep.add("parameter", "algorithm.max_delay_s", "max delay must lie in [0, 0.1] s");
    return;
  }
  const bool decoded = s.output.mode == OutputMode::Speakers;
  if (a.type == Algorithm::Ambisonics && !decoded) {
    try {
      AmbisonicFormat::acn_sn3d(a.horizontal_order, a.periphonic_order).validate();
    } catch (const Error& e) {
      rep.add(e.code(), "algorithm", e.what());
    }
    if (a.reference_distance && !(*a.reference_distance > 0.0))
      rep.add("parameter", "algorithm.reference_distance", "reference distance must be positive");
    if (s.layout)
      rep.add("layout_not_used", "layout",
              "only speaker output decodes to the layout; use output.virtual_layout for binaural output");
    return;
  }
  if (!s.layout) {
    rep.add("missing_layout", "layout", std::string(to_string(a.type)) + " needs a speaker layout");
    return;
  }
  const auto& layout = *s.layout;
  if (layout.size() == 0) return; // already reported while parsing
  const auto geo = validate_layout(layout);
  for (const auto& issue : geo.issues)
    if (issue.code == "non_finite" || issue.code == "zero_distance" || issue.code == "duplicate_position")
      rep.add(issue.code, Reader::join("layout", issue.where), issue.message);
  if (!rep.ok()) return;

  try {
    switch (a.type) {
    case Algorithm::RingPairwise: PairwiseRing{layout}; break;
    case Algorithm::Vbap:
      if (a.dimensionality != 2 && a.dimensionality != 3)
        rep.add("parameter", "algorithm.dimensionality", "dimensionality must be 2 or 3");
      else
        build_bases(layout, a.dimensionality);
      if (!(a.power > 0.0)) rep.add("parameter", "algorithm.power", "power level C must be positive");
      break;
    case Algorithm::Dbap: DbapConfig(layout, a.rolloff_db, a.blur, a.exterior_attenuation); break;
    case Algorithm::Ambisonics: {
      const auto fmt = AmbisonicFormat::acn_sn3d(a.horizontal_order, a.periphonic_order);
      fmt.validate();
      build_decoder(layout, a.horizontal_order, a.periphonic_order, a.decoder, a.delay_compensation);
      if (a.reference_distance && !(*a.reference_distance > 0.0))
        rep.add("parameter", "algorithm.reference_distance", "reference distance must be positive");
      break;
    }
    default: break;
    }
  } catch (const Error& e) {
    rep.add(e.code(), "algorithm", e.what());
  }
}

} // namespace

ValidationReport validate_scene(const Scene& s) {
  ValidationReport rep;
  if (s.sample_rate != 44100.0 && s.sample_rate != 48000.0 && s.sample_rate != 96000.0)
    rep.add("sample_rate", "sample_rate", "sample rate must be 44100, 48000 or 96000 Hz");
  if (!(s.duration > 0.0) || !std::isfinite(s.duration)) rep.add("duration", "duration", "duration must be positive");
  if (s.block_size == 0) rep.add("parameter", "block_size", "block size must be positive");

  const auto& a = s.algorithm;
  if (s.output.mode == OutputMode::Ambisonics && a.type != Algorithm::Ambisonics)
    rep.add("output_mode", "output.mode", "ambisonics output requires the ambisonics algorithm");
  if (s.output.mode == OutputMode::Binaural) {
    if (s.output.hrir_taps == 0) rep.add("parameter", "output.hrir_taps", "HRIR length must be positive");
    if (!s.output.hrir_index.empty() && !std::filesystem::exists(s.output.hrir_index))
      rep.add("missing_file", "output.hrir", "HRIR index '" + s.output.hrir_index.string() + "' does not exist");
  }
  if (s.output.virtual_layout && a.type == Algorithm::Ambisonics && s.output.mode == OutputMode::Binaural) {
    try {
      build_decoder(*s.output.virtual_layout, a.horizontal_order, a.periphonic_order, a.decoder, false);
    } catch (const Error& e) {
      rep.add(e.code(), "output.virtual_layout", e.what());
    }
  }
  check_layout(s, rep);

  if (s.sources.empty()) rep.add("no_sources", "sources", "scene has no sources");
  for (std::size_t i = 0; i < s.sources.size(); ++i) {
    const auto& src = s.sources[i];
    const std::string w = "sources[" + std::to_string(i) + "]";
    if (src.audio.kind == AudioSpec::Kind::File && !std::filesystem::exists(src.audio.path))
      rep.add("missing_file", w + ".audio.path", "audio file '" + src.audio.path.string() + "' does not exist");
    if (!std::isfinite(src.audio.amplitude)) rep.add("parameter", w + ".audio.amplitude", "amplitude must be finite");
    if (src.audio.kind == AudioSpec::Kind::Sine && !(src.audio.frequency >= 0.0 && src.audio.frequency < s.sample_rate / 2))
      rep.add("parameter", w + ".audio.frequency", "sine frequency must lie in [0, fs/2)");
    if (src.keyframes.empty()) rep.add("trajectory", w + ".keyframes", "source has no keyframes");
    for (std::size_t k = 0; k < src.keyframes.size(); ++k) {
      const auto& f = src.keyframes[k];
      const std::string kw = w + ".keyframes[" + std::to_string(k) + "]";
      if (!(f.t >= 0.0 && f.t <= s.duration)) rep.add("trajectory", kw + ".t", "keyframe time outside [0, duration]");
      if (k > 0 && !(f.t > src.keyframes[k - 1].t))
        rep.add("trajectory", kw + ".t", "keyframe times must be strictly increasing");
      if (f.has_position != src.keyframes.front().has_position)
        rep.add("trajectory", kw, "keyframes must all use directions or all use positions");
      if (!std::isfinite(f.gain)) rep.add("trajectory", kw + ".gain", "gain must be finite");
      if (f.has_position) {
        if (!is_finite(f.position)) rep.add("trajectory", kw + ".position", "position must be finite");
        else if (is_direction_based(a.type) && norm(f.position) == 0.0)
          rep.add("trajectory", kw + ".position", "a direction-based panner cannot place a source at the listener");
      } else {
        if (!std::isfinite(f.azimuth)) rep.add("trajectory", kw + ".az_deg", "azimuth must be finite");
        if (!(std::abs(f.elevation) <= kPi / 2 + 1e-12))
          rep.add("trajectory", kw + ".el_deg", "elevation must lie in [-90, 90] degrees");
        if (!(f.distance > 0.0) || !std::isfinite(f.distance))
          rep.add("trajectory", kw + ".dist_m", "distance must be positive");
      }
    }
  }
  for (std::size_t k = 0; k < s.head_yaw.size(); ++k) {
    const auto& y = s.head_yaw[k];
    const std::string kw = "head_yaw[" + std::to_string(k) + "]";
    if (!std::isfinite(y.yaw)) rep.add("trajectory", kw + ".yaw_deg", "yaw must be finite");
    if (!(y.t >= 0.0 && y.t <= s.duration)) rep.add("trajectory", kw + ".t", "keyframe time outside [0, duration]");
    if (k > 0 && !(y.t > s.head_yaw[k - 1].t))
      rep.add("trajectory", kw + ".t", "keyframe times must be strictly increasing");
  }
  return rep;
}

namespace {

// Segment index and blend factor for time t over increasing keyframe times.
template <typename Times>
std::pair<std::size_t, double> locate(const Times& times, double t) {
  const std::size_t n = times.size();
  if (n == 1 || t <= times.front()) return {0, 0.0};
  if (t >= times.back()) return {n - 1, 0.0};
  const auto it = std::upper_bound(times.begin(), times.end(), t);
  const auto k = static_cast<std::size_t>(it - times.begin()) - 1;
  return {k, (t - times[k]) / (times[k + 1] - times[k])};
}

double lerp(double a, double b, double u) { return a + (b - a) * u; }

} // namespace

SourceState evaluate_trajectory(const Source& source, double t) {
  if (source.keyframes.empty()) throw ParameterError("source '" + source.name + "' has no keyframes");
  std::vector<double> times;
  times.reserve(source.keyframes.size());
  for (const auto& k : source.keyframes) times.push_back(k.t);
  auto [k, u] = locate(times, t);
  if (source.interpolation == Interpolation::Hold) u = 0.0;
  const Keyframe& a = source.keyframes[k];
  const Keyframe& b = source.keyframes[std::min(k + 1, source.keyframes.size() - 1)];

  SourceState st;
  st.gain = u == 0.0 ? a.gain : lerp(a.gain, b.gain, u);
  if (a.has_position) {
    st.position = u == 0.0 ? a.position : a.position + u * (b.position - a.position);
    st.distance = norm(st.position);
    st.direction = st.distance > 0.0 ? Direction::from_vector(st.position) : Direction{};
  } else {
    const double az = u == 0.0 ? a.azimuth : lerp(a.azimuth, b.azimuth, u);
    const double el = u == 0.0 ? a.elevation : lerp(a.elevation, b.elevation, u);
    st.distance = u == 0.0 ? a.distance : lerp(a.distance, b.distance, u);
    st.direction = Direction(az, el);
    st.position = spherical_to_position(st.direction, st.distance);
  }
  return st;
}

double evaluate_head_yaw(const std::vector<YawKeyframe>& track, double t) {
  if (track.empty()) return 0.0;
  std::vector<double> times;
  for (const auto& y : track) times.push_back(y.t);
  const auto [k, u] = locate(times, t);
  if (u == 0.0) return track[k].yaw;
  return lerp(track[k].yaw, track[k + 1].yaw, u);
}

} // namespace spatia
