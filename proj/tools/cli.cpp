#include "cli.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "spatia/ambisonics.hpp"
#include "spatia/binaural.hpp"
#include "spatia/dbap.hpp"
#include "spatia/layout_io.hpp"
#include "spatia/panning.hpp"
#include "spatia/render.hpp"
#include "spatia/vbap.hpp"
#include "spatia/wav.hpp"
#include "spatia/widener.hpp"

namespace spatia::cli {

namespace {

using nlohmann::json;

/// Flag combinations the parser cannot reject on its own.
class UsageError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

std::string fmt9(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

bool is_validation_code(const Error& e) {
  for (const char* c : {"parameter", "out_of_range", "layout", "degenerate_geometry", "coverage",
                        "dimension_mismatch", "unsupported_order", "conditioning", "normalization", "validation",
                        "render"})
    if (std::strcmp(e.code(), c) == 0) return true;
  return false;
}

struct Context {
  std::ostream& out;
  std::ostream& err;
  bool json_mode = false;
  std::string command;

  void result(const json& doc, const std::string& text) const {
    if (json_mode) {
      json wrapped{{"ok", true}, {"command", command}, {"result", doc}};
      out << wrapped.dump(2) << '\n';
    } else if (!text.empty()) {
      out << text;
    }
  }
};

std::optional<Vec3> parse_position(const std::string& s) {
  Vec3 p;
  char tail = 0;
  if (std::sscanf(s.c_str(), "%lf,%lf,%lf%c", &p.x, &p.y, &p.z, &tail) != 3) return std::nullopt;
  return p;
}

void require(bool ok, const std::string& message) {
  if (!ok) throw UsageError(message);
}

// ---------------------------------------------------------------------------
// pan

struct PanArgs {
  std::string algo;
  std::string layout;
  double azimuth = 0.0;
  double elevation = 0.0;
  double distance = 1.0;
  std::string position;
  double blur = 0.0;
  double rolloff = 6.0;
  bool exterior_attenuation = false;
  double power = 1.0;
  int dimensionality = 2;
  double half_angle = 30.0;
  double max_delay = 0.002;
  std::string normalization = "unit-power";
  int order = 1;
  int periphonic = -1;
  std::string decoder = "projection";
};

int run_pan(const Context& ctx, const PanArgs& a, CLI::App& sub) {
  auto given = [&](const char* name) { return sub.get_option(name)->count() > 0; };
  const Algorithm algo = parse_algorithm(a.algo);
  const bool stereo = algo == Algorithm::StereoTangent || algo == Algorithm::StereoDelay;

  auto only_for = [&](const char* flag, bool allowed) {
    require(!given(flag) || allowed, std::string(flag) + " cannot be used with --algo " + a.algo);
  };
  only_for("--position", algo == Algorithm::Dbap);
  only_for("--blur", algo == Algorithm::Dbap);
  only_for("--rolloff", algo == Algorithm::Dbap);
  only_for("--exterior-attenuation", algo == Algorithm::Dbap);
  only_for("--distance", algo == Algorithm::Dbap);
  only_for("--power", algo == Algorithm::Vbap);
  only_for("--dimensionality", algo == Algorithm::Vbap);
  only_for("--half-angle", stereo);
  only_for("--max-delay", algo == Algorithm::StereoDelay);
  only_for("--normalization", algo == Algorithm::StereoTangent || algo == Algorithm::RingPairwise);
  only_for("--order", algo == Algorithm::Ambisonics);
  only_for("--periphonic", algo == Algorithm::Ambisonics);
  only_for("--decoder", algo == Algorithm::Ambisonics);
  only_for("--layout", !stereo);
  only_for("--elevation", !stereo && algo != Algorithm::RingPairwise);
  require(stereo || given("--layout"), "--algo " + a.algo + " needs --layout");
  require(algo == Algorithm::Dbap || given("--azimuth"), "--azimuth is required");
  require(algo != Algorithm::Dbap || given("--position") || given("--azimuth"),
          "--algo dbap needs --position or --azimuth");
  require(!(given("--position") && given("--azimuth")), "--position and --azimuth are mutually exclusive");

  const Normalization norm = a.normalization == "unit-amplitude" ? Normalization::UnitAmplitude
                                                                  : Normalization::UnitPower;
  const double az = deg_to_rad(a.azimuth);
  LoudspeakerLayout layout = stereo ? layouts::stereo(deg_to_rad(a.half_angle)) : load_layout(a.layout);
  GainVector g;
  std::optional<double> exterior;
  bool degenerate = false;
  switch (algo) {
  case Algorithm::StereoTangent: g = tangent_law_gains(az, deg_to_rad(a.half_angle), norm); break;
  case Algorithm::StereoDelay: g = delay_pan(az, deg_to_rad(a.half_angle), a.max_delay); break;
  case Algorithm::RingPairwise: g = ring_pan(az, PairwiseRing(layout), norm); break;
  case Algorithm::Vbap: g = vbap_pan(layout, a.dimensionality, Direction(az, deg_to_rad(a.elevation)), a.power); break;
  case Algorithm::Dbap: {
    Position p;
    if (given("--position")) {
      const auto parsed = parse_position(a.position);
      require(parsed.has_value(), "--position expects x,y,z");
      p = *parsed;
    } else {
      p = spherical_to_position(Direction(az, deg_to_rad(a.elevation)), a.distance);
    }
    const auto res = dbap_pan(p, DbapConfig(layout, a.rolloff, a.blur, a.exterior_attenuation));
    g = res.gains;
    exterior = res.exterior_distance;
    degenerate = res.degenerate;
    break;
  }
  case Algorithm::Ambisonics: {
    const int p = a.periphonic < 0 ? a.order : a.periphonic;
    const auto d = build_decoder(layout, a.order, p, parse_decoder_flavour(a.decoder));
    const auto frame = encode_hoa(1.0, Direction(az, deg_to_rad(a.elevation)), a.order, p);
    g = GainVector(spatia::decode(frame, d));
    break;
  }
  }

  const bool delays = algo == Algorithm::StereoDelay;
  std::string text = delays ? "speaker\taz_deg\tel_deg\tgain\tdelay_s\n" : "speaker\taz_deg\tel_deg\tgain\n";
  json rows = json::array();
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Direction d = layout.direction(i);
    text += std::to_string(i) + "\t" + fmt9(rad_to_deg(d.azimuth())) + "\t" + fmt9(rad_to_deg(d.elevation())) + "\t" +
            fmt9(g.gains[i]);
    if (delays) text += "\t" + fmt9(g.delays[i]);
    text += "\n";
    json row{{"speaker", i}, {"az_deg", rad_to_deg(d.azimuth())}, {"el_deg", rad_to_deg(d.elevation())},
             {"gain", g.gains[i]}};
    if (delays) row["delay_s"] = g.delays[i];
    rows.push_back(std::move(row));
  }
  json doc{{"algorithm", a.algo}, {"speakers", rows}, {"power", g.power()}};
  if (exterior) {
    doc["exterior_distance"] = *exterior;
    doc["degenerate"] = degenerate;
    if (*exterior > 0.0) text += "# exterior_distance\t" + fmt9(*exterior) + "\n";
    if (degenerate) text += "# source coincides with a speaker; limit gains returned\n";
  }
  ctx.result(doc, text);
  return kSuccess;
}

// ---------------------------------------------------------------------------
// file commands

json file_summary(const std::string& path, std::size_t channels, std::size_t frames, double rate) {
  return {{"output", path}, {"channels", channels}, {"frames", frames}, {"sample_rate", rate}};
}

std::string file_text(const std::string& path, std::size_t channels, std::size_t frames) {
  return "wrote " + path + " (" + std::to_string(channels) + " channels, " + std::to_string(frames) + " frames)\n";
}

struct EncodeArgs {
  std::string input, output, format = "float32";
  double azimuth = 0.0, elevation = 0.0;
  int order = 1;
  int periphonic = -1;
  bool fuma = false;
};

int run_encode(const Context& ctx, const EncodeArgs& a, CLI::App& sub) {
  require(!(a.fuma && (sub.get_option("--order")->count() || sub.get_option("--periphonic")->count())),
          "--fuma is first order only; drop --order/--periphonic");
  const AudioBuffer in = read_wav(a.input);
  if (in.channels.size() != 1)
    throw DimensionError("encode expects a mono input, '" + a.input + "' has " + std::to_string(in.channels.size()) +
                         " channels");
  const int p = a.periphonic < 0 ? a.order : a.periphonic;
  const AmbisonicFormat format = a.fuma ? AmbisonicFormat::fuma() : AmbisonicFormat::acn_sn3d(a.order, p);
  const auto coeffs = encoding_coefficients(Direction(deg_to_rad(a.azimuth), deg_to_rad(a.elevation)), format);
  AmbisonicStream s{format, in.sample_rate, {}};
  for (double c : coeffs) {
    std::vector<double> ch(in.channels[0]);
    for (double& v : ch) v *= c;
    s.channels.push_back(std::move(ch));
  }
  write_ambisonic(a.output, s, parse_sample_format(a.format));
  json doc = file_summary(a.output, s.channels.size(), s.frames(), s.sample_rate);
  doc["ordering"] = std::string(to_string(format.ordering));
  doc["H"] = format.horizontal_order;
  doc["P"] = format.periphonic_order;
  ctx.result(doc, file_text(a.output, s.channels.size(), s.frames()));
  return kSuccess;
}

struct DecodeArgs {
  std::string input, output, format = "float32";
  std::string layout, decoder = "projection";
  bool delay_compensation = false;
  bool binaural = false;
  std::string hrir, virtual_layout;
  std::size_t hrir_taps = 256;
  std::size_t block = kDefaultBlockSize;
  double yaw = 0.0;
};

int run_decode(const Context& ctx, const DecodeArgs& a, CLI::App& sub) {
  auto given = [&](const char* name) { return sub.get_option(name)->count() > 0; };
  require(a.binaural != given("--layout"), "decode needs exactly one of --layout or --binaural");
  require(a.binaural || (!given("--hrir") && !given("--virtual-layout") && !given("--hrir-taps") && !given("--yaw")),
          "--hrir, --virtual-layout, --hrir-taps and --yaw need --binaural");
  require(!a.binaural || !given("--delay-compensation"), "--delay-compensation applies to loudspeaker decoding only");

  AmbisonicStream s = to_acn_sn3d(read_ambisonic(a.input));
  const auto flavour = parse_decoder_flavour(a.decoder);
  const int h = s.format.horizontal_order, p = s.format.periphonic_order;
  AudioBuffer out{s.sample_rate, {}};
  if (!a.binaural) {
    const auto layout = load_layout(a.layout);
    const auto d = build_decoder(layout, h, p, flavour, a.delay_compensation);
    out.channels = spatia::decode(s, d);
  } else {
    if (a.yaw != 0.0) compensate_head_rotation(s, deg_to_rad(a.yaw));
    LoudspeakerLayout layout;
    if (!a.virtual_layout.empty()) layout = load_layout(a.virtual_layout);
    else if (p == 0) layout = layouts::ring(std::max<std::size_t>(8, s.format.component_count() + 1));
    else if (h == 1) layout = layouts::cube();
    else throw ParameterError("binaural decoding of this order needs --virtual-layout");
    const auto d = build_decoder(layout, h, p, flavour);
    std::vector<Hrir> hrirs;
    if (a.hrir.empty()) {
      for (std::size_t i = 0; i < layout.size(); ++i)
        hrirs.push_back(synthesize_spherical_head_hrir(layout.direction(i), s.sample_rate, a.hrir_taps));
    } else {
      double rate = 0.0;
      const auto set = load_hrir_set(a.hrir, &rate);
      if (rate != s.sample_rate) throw FormatError("HRIR sample rate does not match the input");
      hrirs = hrirs_for_layout(set, layout);
    }
    const auto ears = apply_filter_matrix(s, precompute_filter_matrix(d, hrirs), a.block);
    out.channels = {ears.left, ears.right};
  }
  write_wav(a.output, out, parse_sample_format(a.format));
  ctx.result(file_summary(a.output, out.channels.size(), out.frames(), out.sample_rate),
             file_text(a.output, out.channels.size(), out.frames()));
  return kSuccess;
}

struct RotateArgs {
  std::string input, output, format = "float32";
  double yaw = 0.0, pitch = 0.0, roll = 0.0;
};

int run_rotate(const Context& ctx, const RotateArgs& a) {
  AmbisonicStream s = read_ambisonic(a.input);
  if (a.yaw != 0.0) rotate_z(s, deg_to_rad(a.yaw));
  if (a.pitch != 0.0) rotate_y(s, deg_to_rad(a.pitch));
  if (a.roll != 0.0) rotate_x(s, deg_to_rad(a.roll));
  write_ambisonic(a.output, s, parse_sample_format(a.format));
  ctx.result(file_summary(a.output, s.channels.size(), s.frames(), s.sample_rate),
             file_text(a.output, s.channels.size(), s.frames()));
  return kSuccess;
}

struct RenderArgs {
  std::string scene, output, format = "float32";
  std::size_t block = 0;
  bool precise = false;
  bool normalize = false;
  bool check = false;
};

int run_render(const Context& ctx, const RenderArgs& a) {
  Scene scene = load_scene(a.scene);
  if (a.block > 0) scene.block_size = a.block;
  if (a.precise) scene.precise = true;
  if (a.check) {
    const auto rep = validate_scene(scene);
    if (!rep.ok()) throw ValidationError(rep);
    ctx.result(report_to_json(rep), "scene is valid\n");
    return kSuccess;
  }
  RenderOutput r = Renderer(std::move(scene)).render();
  double peak = 0.0;
  for (const auto& ch : r.audio.channels)
    for (double v : ch) peak = std::max(peak, std::abs(v));
  if (a.normalize && peak > 1.0) {
    for (auto& ch : r.audio.channels)
      for (double& v : ch) v /= peak;
  }
  const auto fmt = parse_sample_format(a.format);
  if (r.ambisonic_format)
    write_ambisonic(a.output, AmbisonicStream{*r.ambisonic_format, r.audio.sample_rate, r.audio.channels}, fmt);
  else
    write_wav(a.output, r.audio, fmt);
  json doc = file_summary(a.output, r.audio.channels.size(), r.audio.frames(), r.audio.sample_rate);
  doc["peak"] = peak;
  std::string text = file_text(a.output, r.audio.channels.size(), r.audio.frames());
  if (peak > 1.0 && !a.normalize) text += "# peak " + fmt9(peak) + " exceeds full scale; use --normalize\n";
  ctx.result(doc, text);
  return kSuccess;
}

struct WidenArgs {
  std::string input, output, format = "float32";
  WidenerParams params;
  bool identity = false;
};

int run_widen(const Context& ctx, WidenArgs a, CLI::App& sub) {
  if (a.identity) {
    for (const char* f : {"--side-gain", "--crossfeed", "--crossfeed-cutoff", "--reflection-delay",
                          "--reflection-gain", "--reflection-cutoff"})
      require(sub.get_option(f)->count() == 0, std::string("--identity cannot be combined with ") + f);
    a.params = WidenerParams::identity();
  }
  const AudioBuffer in = read_wav(a.input);
  if (in.channels.size() != 2)
    throw DimensionError("widen expects a stereo input, '" + a.input + "' has " + std::to_string(in.channels.size()) +
                         " channels");
  const auto res = stereo_widen({in.channels[0], in.channels[1]}, a.params, in.sample_rate);
  const AudioBuffer out{in.sample_rate, {res.left, res.right}};
  write_wav(a.output, out, parse_sample_format(a.format));
  ctx.result(file_summary(a.output, 2, out.frames(), out.sample_rate), file_text(a.output, 2, out.frames()));
  return kSuccess;
}

// ---------------------------------------------------------------------------
// layout / hrir

int run_layout_validate(const Context& ctx, const std::string& path) {
  const auto layout = load_layout(path);
  const auto rep = validate_layout(layout);
  if (!rep.ok()) throw ValidationError(rep);
  ctx.result(report_to_json(rep),
             "layout '" + layout.name + "' (" + std::to_string(layout.size()) + " speakers, " +
                 std::string(to_string(layout.category)) + ") is valid\n");
  return kSuccess;
}

int run_layout_preset(const Context& ctx, const std::string& name, const std::string& output) {
  const auto layout = layouts::preset(name);
  const auto doc = layout_to_json(layout);
  if (!output.empty()) {
    save_layout(layout, output);
    ctx.result({{"output", output}}, "wrote " + output + "\n");
  } else {
    ctx.result(doc, doc.dump(2) + "\n");
  }
  return kSuccess;
}

int run_layout_list(const Context& ctx) {
  json names = json::array();
  std::string text;
  for (const auto& n : layouts::preset_names()) {
    names.push_back(n);
    text += n + "\n";
  }
  ctx.result({{"presets", names}}, text);
  return kSuccess;
}

struct HrirArgs {
  std::string output;
  double az_step = 5.0, el_step = 0.0, rate = 48000.0, radius = kDefaultHeadRadius;
  std::size_t taps = 256;
};

int run_hrir_gen(const Context& ctx, const HrirArgs& a) {
  const auto set = synthesize_spherical_head_set(a.az_step, a.el_step, a.rate, a.taps, a.radius);
  save_hrir_set(set, a.rate, a.output);
  ctx.result({{"output", a.output}, {"entries", set.size()}, {"taps", a.taps}, {"sample_rate", a.rate}},
             "wrote " + a.output + " (" + std::to_string(set.size()) + " directions)\n");
  return kSuccess;
}

void report_error(const Context& ctx, const std::string& code, const std::string& message,
                  const ValidationReport* report) {
  if (ctx.json_mode) {
    json doc{{"ok", false}, {"command", ctx.command}, {"error", {{"code", code}, {"message", message}}}};
    if (report) doc["error"]["issues"] = report_to_json(*report)["issues"];
    ctx.err << doc.dump(2) << '\n';
    return;
  }
  ctx.err << "error [" << code << "]: " << message << '\n';
  if (report)
    for (const auto& i : report->issues)
      ctx.err << "  - " << i.code << (i.where.empty() ? "" : " at " + i.where) << ": " << i.message << '\n';
}

} // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Context ctx{out, err, false, {}};
  for (int i = 1; i < argc; ++i)
    if (std::strcmp(argv[i], "--json") == 0) ctx.json_mode = true;

  CLI::App app{"Spatial audio panning, Ambisonics and binaural rendering", "spatia"};
  app.require_subcommand(1);
  app.fallthrough();
  bool json_flag = false;
  app.add_flag("--json", json_flag, "Wrap results and errors in a JSON document");

  // pan
  PanArgs pan;
  auto* pan_cmd = app.add_subcommand("pan", "Print per-speaker gains for one source");
  pan_cmd->add_option("--algo", pan.algo, "stereo-tangent|stereo-delay|ring-pairwise|vbap|dbap|ambisonics")
      ->required()
      ->check(CLI::IsMember({"stereo-tangent", "stereo-delay", "ring-pairwise", "vbap", "dbap", "ambisonics"}));
  pan_cmd->add_option("--layout", pan.layout, "Layout file or preset:<name>");
  pan_cmd->add_option("--azimuth", pan.azimuth, "Source azimuth in degrees (counterclockwise)");
  pan_cmd->add_option("--elevation", pan.elevation, "Source elevation in degrees");
  pan_cmd->add_option("--distance", pan.distance, "Source distance in metres (dbap with --azimuth)");
  pan_cmd->add_option("--position", pan.position, "Source position x,y,z in metres (dbap)");
  pan_cmd->add_option("--blur", pan.blur, "Spatial blur in metres (dbap)");
  pan_cmd->add_option("--rolloff", pan.rolloff, "Rolloff in dB per distance doubling (dbap)");
  pan_cmd->add_flag("--exterior-attenuation", pan.exterior_attenuation, "Attenuate sources outside the hull (dbap)");
  pan_cmd->add_option("--power", pan.power, "Power level C (vbap)");
  pan_cmd->add_option("--dimensionality", pan.dimensionality, "2 or 3 (vbap)")->check(CLI::IsMember({2, 3}));
  pan_cmd->add_option("--half-angle", pan.half_angle, "Stereo half angle in degrees");
  pan_cmd->add_option("--max-delay", pan.max_delay, "Maximum delay in seconds (stereo-delay)");
  pan_cmd->add_option("--normalization", pan.normalization, "unit-power|unit-amplitude")
      ->check(CLI::IsMember({"unit-power", "unit-amplitude"}));
  pan_cmd->add_option("--order", pan.order, "Horizontal order H (ambisonics)");
  pan_cmd->add_option("--periphonic", pan.periphonic, "Periphonic order P (ambisonics, default H)");
  pan_cmd->add_option("--decoder", pan.decoder, "projection|pseudoinverse (ambisonics)");

  // encode
  EncodeArgs enc;
  auto* enc_cmd = app.add_subcommand("encode", "Encode a mono file at a fixed direction");
  enc_cmd->add_option("--input", enc.input, "Mono WAV file")->required();
  enc_cmd->add_option("--output", enc.output, "Ambisonic WAV file (sidecar written alongside)")->required();
  enc_cmd->add_option("--azimuth", enc.azimuth, "Azimuth in degrees");
  enc_cmd->add_option("--elevation", enc.elevation, "Elevation in degrees");
  enc_cmd->add_option("--order", enc.order, "Horizontal order H");
  enc_cmd->add_option("--periphonic", enc.periphonic, "Periphonic order P (default H)");
  enc_cmd->add_flag("--fuma", enc.fuma, "Write first-order FuMa B-format");
  enc_cmd->add_option("--format", enc.format, "Sample format")->check(CLI::IsMember({"pcm16", "pcm24", "pcm32", "float32", "float64"}));

  // decode
  DecodeArgs dec;
  auto* dec_cmd = app.add_subcommand("decode", "Decode an Ambisonic file to speakers or headphones");
  dec_cmd->add_option("--input", dec.input, "Ambisonic WAV file")->required();
  dec_cmd->add_option("--output", dec.output, "Output WAV file")->required();
  dec_cmd->add_option("--layout", dec.layout, "Speaker layout file or preset:<name>");
  dec_cmd->add_option("--decoder", dec.decoder, "projection|pseudoinverse")
      ->check(CLI::IsMember({"projection", "pseudoinverse"}));
  dec_cmd->add_flag("--delay-compensation", dec.delay_compensation, "Delay nearer speakers of irregular layouts");
  dec_cmd->add_flag("--binaural", dec.binaural, "Decode through virtual speakers to two ears");
  dec_cmd->add_option("--hrir", dec.hrir, "HRIR index file (default: synthetic spherical head)");
  dec_cmd->add_option("--virtual-layout", dec.virtual_layout, "Virtual speaker layout");
  dec_cmd->add_option("--hrir-taps", dec.hrir_taps, "Synthetic HRIR length");
  dec_cmd->add_option("--block", dec.block, "Convolution block size");
  dec_cmd->add_option("--yaw", dec.yaw, "Listener head yaw in degrees");
  dec_cmd->add_option("--format", dec.format, "Sample format")->check(CLI::IsMember({"pcm16", "pcm24", "pcm32", "float32", "float64"}));

  // rotate
  RotateArgs rot;
  auto* rot_cmd = app.add_subcommand("rotate", "Rotate a first-order sound field (yaw, then pitch, then roll)");
  rot_cmd->add_option("--input", rot.input, "Ambisonic WAV file")->required();
  rot_cmd->add_option("--output", rot.output, "Ambisonic WAV file")->required();
  rot_cmd->add_option("--yaw", rot.yaw, "Rotation about z in degrees");
  rot_cmd->add_option("--pitch", rot.pitch, "Rotation about y in degrees");
  rot_cmd->add_option("--roll", rot.roll, "Rotation about x in degrees");
  rot_cmd->add_option("--format", rot.format, "Sample format")->check(CLI::IsMember({"pcm16", "pcm24", "pcm32", "float32", "float64"}));

  // render
  RenderArgs ren;
  auto* ren_cmd = app.add_subcommand("render", "Render a scene file");
  ren_cmd->add_option("--scene", ren.scene, "Scene JSON file")->required();
  ren_cmd->add_option("--output", ren.output, "Output WAV file");
  ren_cmd->add_option("--block", ren.block, "Override the scene block size");
  ren_cmd->add_flag("--precise", ren.precise, "Evaluate coefficients per sample");
  ren_cmd->add_flag("--normalize", ren.normalize, "Scale the output down if it exceeds full scale");
  ren_cmd->add_flag("--check", ren.check, "Validate the scene without rendering");
  ren_cmd->add_option("--format", ren.format, "Sample format")->check(CLI::IsMember({"pcm16", "pcm24", "pcm32", "float32", "float64"}));

  // layout
  auto* lay_cmd = app.add_subcommand("layout", "Inspect speaker layouts");
  lay_cmd->require_subcommand(1);
  std::string lay_path, preset_name, preset_out;
  auto* lay_val = lay_cmd->add_subcommand("validate", "Check a layout file");
  lay_val->add_option("layout", lay_path, "Layout file or preset:<name>")->required();
  auto* lay_pre = lay_cmd->add_subcommand("preset", "Print or save a preset layout");
  lay_pre->add_option("name", preset_name, "Preset name")->required();
  lay_pre->add_option("--output", preset_out, "Write the layout to a file");
  auto* lay_list = lay_cmd->add_subcommand("list", "List preset names");

  // hrir
  auto* hrir_cmd = app.add_subcommand("hrir", "HRIR utilities");
  hrir_cmd->require_subcommand(1);
  HrirArgs hr;
  auto* hrir_gen = hrir_cmd->add_subcommand("gen", "Write a synthetic spherical-head HRIR set");
  hrir_gen->add_option("--output", hr.output, "Index file to write")->required();
  hrir_gen->add_option("--az-step", hr.az_step, "Azimuth spacing in degrees");
  hrir_gen->add_option("--el-step", hr.el_step, "Elevation spacing in degrees (0: horizontal only)");
  hrir_gen->add_option("--rate", hr.rate, "Sample rate in Hz");
  hrir_gen->add_option("--taps", hr.taps, "Response length");
  hrir_gen->add_option("--radius", hr.radius, "Head radius in metres");

  // widen
  WidenArgs wid;
  auto* wid_cmd = app.add_subcommand("widen", "Stereo widening for headphone playback");
  wid_cmd->add_option("--input", wid.input, "Stereo WAV file")->required();
  wid_cmd->add_option("--output", wid.output, "Stereo WAV file")->required();
  wid_cmd->add_option("--side-gain", wid.params.side_gain, "Side signal gain");
  wid_cmd->add_option("--crossfeed", wid.params.crossfeed_gain, "Crossfeed gain");
  wid_cmd->add_option("--crossfeed-cutoff", wid.params.crossfeed_cutoff_hz, "Crossfeed low-pass cutoff in Hz");
  wid_cmd->add_option("--reflection-delay", wid.params.reflection_delay_s, "Reflection delay in seconds");
  wid_cmd->add_option("--reflection-gain", wid.params.reflection_gain, "Reflection gain");
  wid_cmd->add_option("--reflection-cutoff", wid.params.reflection_cutoff_hz, "Reflection low-pass cutoff in Hz");
  wid_cmd->add_flag("--identity", wid.identity, "Pass the input through unchanged");
  wid_cmd->add_option("--format", wid.format, "Sample format")->check(CLI::IsMember({"pcm16", "pcm24", "pcm32", "float32", "float64"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    const CLI::App* target = &app;
    while (!target->get_subcommands().empty()) target = target->get_subcommands().front();
    out << target->help();
    return kSuccess;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kSuccess;
  } catch (const CLI::ParseError& e) {
    if (!app.get_subcommands().empty()) ctx.command = app.get_subcommands().front()->get_name();
    report_error(ctx, "usage", e.what(), nullptr);
    return kUsage;
  }
  ctx.command = app.get_subcommands().front()->get_name();

  try {
    if (pan_cmd->parsed()) return run_pan(ctx, pan, *pan_cmd);
    if (enc_cmd->parsed()) return run_encode(ctx, enc, *enc_cmd);
    if (dec_cmd->parsed()) return run_decode(ctx, dec, *dec_cmd);
    if (rot_cmd->parsed()) return run_rotate(ctx, rot);
    if (ren_cmd->parsed()) {
      require(ren.check || !ren.output.empty(), "render needs --output (or --check)");
      return run_render(ctx, ren);
    }
    if (lay_val->parsed()) return run_layout_validate(ctx, lay_path);
    if (lay_pre->parsed()) return run_layout_preset(ctx, preset_name, preset_out);
    if (lay_list->parsed()) return run_layout_list(ctx);
    if (hrir_gen->parsed()) return run_hrir_gen(ctx, hr);
    if (wid_cmd->parsed()) return run_widen(ctx, wid, *wid_cmd);
  } catch (const UsageError& e) {
    report_error(ctx, "usage", e.what(), nullptr);
    return kUsage;
  } catch (const ValidationError& e) {
    report_error(ctx, e.code(), e.what(), &e.report());
    return kValidation;
  } catch (const Error& e) {
    report_error(ctx, e.code(), e.what(), nullptr);
    return is_validation_code(e) ? kValidation : kRuntime;
  } catch (const std::exception& e) {
    report_error(ctx, "runtime", e.what(), nullptr);
    return kRuntime;
  }
  report_error(ctx, "usage", "no command given", nullptr);
  return kUsage;
}

} // namespace spatia::cli
