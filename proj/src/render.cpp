#include "spatia/render.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>

#include "spatia/binaural.hpp"
#include "spatia/dbap.hpp"
#include "spatia/dsp.hpp"
#include "spatia/kernels.hpp"
#include "spatia/panning.hpp"
#include "spatia/vbap.hpp"

namespace spatia {

struct Renderer::Impl {
  std::function<GainVector(const SourceState&)> pan;
  LoudspeakerLayout speakers; // physical or virtual speakers (unused for Ambisonics output)
  std::size_t bus_channels = 0;
  bool uses_delays = false;
  bool ambisonic = false;
  AmbisonicFormat format;
  std::optional<DecoderMatrix> decoder;
  std::optional<BinauralFilterMatrix> filters;
  std::vector<Hrir> hrirs;
};

namespace {

LoudspeakerLayout default_virtual_layout(const AmbisonicFormat& f) {
  if (f.periphonic_order == 0) {
    const std::size_t n = std::max<std::size_t>(8, f.component_count() + 1);
    return layouts::ring(n, 1.0, 0.0, "virtual-ring-" + std::to_string(n));
  }
  if (f.horizontal_order == 1) return layouts::cube();
  ValidationReport rep;
  rep.add("virtual_layout", "output.virtual_layout",
          "binaural rendering of #" + std::to_string(f.horizontal_order) + "#" + std::to_string(f.periphonic_order) +
              " needs an explicit virtual layout");
  throw ValidationError(rep);
}

std::vector<Hrir> speaker_hrirs(const OutputConfig& out, const LoudspeakerLayout& layout, double fs) {
  if (out.hrir_index.empty()) {
    std::vector<Hrir> h;
    for (std::size_t i = 0; i < layout.size(); ++i)
      h.push_back(synthesize_spherical_head_hrir(layout.direction(i), fs, out.hrir_taps));
    return h;
  }
  double rate = 0.0;
  const HrirSet set = load_hrir_set(out.hrir_index, &rate);
  if (rate != fs)
    throw FormatError("HRIR set sample rate " + std::to_string(rate) + " Hz does not match the scene rate " +
                      std::to_string(fs) + " Hz");
  return hrirs_for_layout(set, layout);
}

GainVector scaled(GainVector g, double s) {
  if (s != 1.0)
    for (double& v : g.gains) v *= s;
  return g;
}

} // namespace

Renderer::Renderer(Scene scene) : scene_(std::move(scene)), impl_(std::make_unique<Impl>()) {
  const auto report = validate_scene(scene_);
  if (!report.ok()) throw ValidationError(report);
  auto& im = *impl_;
  const auto& a = scene_.algorithm;
  const bool binaural = scene_.output.mode == OutputMode::Binaural;

  switch (a.type) {
  case Algorithm::StereoTangent:
    im.speakers = layouts::stereo(a.half_angle);
    im.pan = [half = a.half_angle, norm = a.normalization](const SourceState& s) {
      return scaled(tangent_law_gains(s.direction.azimuth(), half, norm), s.gain);
    };
    break;
  case Algorithm::StereoDelay:
    im.speakers = layouts::stereo(a.half_angle);
    im.uses_delays = true;
    im.pan = [half = a.half_angle, md = a.max_delay](const SourceState& s) {
      return scaled(delay_pan(s.direction.azimuth(), half, md), s.gain);
    };
    break;
  case Algorithm::RingPairwise: {
    im.speakers = *scene_.layout;
    auto ring = std::make_shared<PairwiseRing>(im.speakers);
    im.pan = [ring, norm = a.normalization](const SourceState& s) {
      return scaled(ring_pan(s.direction.azimuth(), *ring, norm), s.gain);
    };
    break;
  }
  case Algorithm::Vbap: {
    im.speakers = *scene_.layout;
    auto bases = std::make_shared<BaseSet>(build_bases(im.speakers, a.dimensionality));
    im.pan = [bases, power = a.power](const SourceState& s) {
      return scaled(vbap_pan(*bases, s.direction, power), s.gain);
    };
    break;
  }
  case Algorithm::Dbap: {
    im.speakers = *scene_.layout;
    auto cfg = std::make_shared<DbapConfig>(im.speakers, a.rolloff_db, a.blur, a.exterior_attenuation);
    im.pan = [cfg](const SourceState& s) { return scaled(dbap_pan(s.position, *cfg).gains, s.gain); };
    break;
  }
  case Algorithm::Ambisonics: {
    im.ambisonic = true;
    im.format = AmbisonicFormat::acn_sn3d(a.horizontal_order, a.periphonic_order);
    im.pan = [fmt = im.format, ref = a.reference_distance](const SourceState& s) {
      const double g = s.gain * (ref ? distance_gain(s.distance, *ref) : 1.0);
      return scaled(GainVector(encoding_coefficients(s.direction, fmt)), g);
    };
    if (scene_.output.mode == OutputMode::Speakers) {
      im.speakers = *scene_.layout;
      im.decoder = build_decoder(im.speakers, a.horizontal_order, a.periphonic_order, a.decoder, a.delay_compensation);
    } else if (binaural) {
      im.speakers = scene_.output.virtual_layout ? *scene_.output.virtual_layout : default_virtual_layout(im.format);
      im.decoder = build_decoder(im.speakers, a.horizontal_order, a.periphonic_order, a.decoder, false);
    }
    break;
  }
  }
  im.bus_channels = im.ambisonic ? im.format.component_count() : im.speakers.size();
  if (binaural) {
    im.hrirs = speaker_hrirs(scene_.output, im.speakers, scene_.sample_rate);
    if (im.ambisonic) im.filters = precompute_filter_matrix(*im.decoder, im.hrirs);
  }
}

Renderer::~Renderer() = default;
Renderer::Renderer(Renderer&&) noexcept = default;
Renderer& Renderer::operator=(Renderer&&) noexcept = default;

std::size_t Renderer::bus_channels() const noexcept { return impl_->bus_channels; }

std::size_t Renderer::output_channels() const noexcept {
  switch (scene_.output.mode) {
  case OutputMode::Binaural: return 2;
  case OutputMode::Ambisonics: return impl_->format.component_count();
  case OutputMode::Speakers: break;
  }
  return impl_->speakers.size();
}

GainVector Renderer::coefficients(std::size_t index, double t) const {
  const Source& src = scene_.sources.at(index);
  try {
    SourceState st = evaluate_trajectory(src, t);
    if (scene_.output.mode == OutputMode::Binaural && !scene_.head_yaw.empty()) {
      // Turning the head by +yaw moves the scene by -yaw relative to the ears.
      const double yaw = evaluate_head_yaw(scene_.head_yaw, t);
      const double c = std::cos(yaw), s = std::sin(yaw);
      st.position = {c * st.position.x + s * st.position.y, -s * st.position.x + c * st.position.y, st.position.z};
      st.direction = Direction(st.direction.azimuth() - yaw, st.direction.elevation());
    }
    return impl_->pan(st);
  } catch (const Error& e) {
    char when[32];
    std::snprintf(when, sizeof when, "%.6f", t);
    throw RenderError("source '" + src.name + "' at t=" + when + " s: " + e.what());
  }
}

std::vector<double> Renderer::source_signal(std::size_t index) const {
  const Source& src = scene_.sources.at(index);
  const AudioSpec& a = src.audio;
  const std::size_t n = scene_.frames();
  const double fs = scene_.sample_rate;
  std::vector<double> x(n, 0.0);
  switch (a.kind) {
  case AudioSpec::Kind::Sine:
    for (std::size_t i = 0; i < n; ++i) x[i] = a.amplitude * std::sin(2.0 * kPi * a.frequency * static_cast<double>(i) / fs);
    break;
  case AudioSpec::Kind::Noise: {
    std::mt19937_64 rng(a.seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (double& v : x) v = a.amplitude * dist(rng);
    break;
  }
  case AudioSpec::Kind::Impulse: {
    const auto at = static_cast<std::size_t>(std::llround(a.at * fs));
    if (at < n) x[at] = a.amplitude;
    break;
  }
  case AudioSpec::Kind::File: {
    const AudioBuffer in = read_wav(a.path);
    if (in.channels.size() != 1)
      throw FormatError("source '" + src.name + "': '" + a.path.string() + "' must be mono, it has " +
                        std::to_string(in.channels.size()) + " channels");
    if (in.sample_rate != fs)
      throw FormatError("source '" + src.name + "': '" + a.path.string() + "' is at " +
                        std::to_string(in.sample_rate) + " Hz, the scene at " + std::to_string(fs) + " Hz");
    std::copy_n(in.channels[0].begin(), std::min(n, in.channels[0].size()), x.begin());
    for (double& v : x) v *= a.amplitude;
    break;
  }
  }
  return x;
}

RenderOutput Renderer::render() const {
  const auto& im = *impl_;
  const std::size_t n = scene_.frames();
  const double fs = scene_.sample_rate;
  const std::size_t block = scene_.block_size;
  const std::size_t channels = im.bus_channels;
  const auto& kern = kernels::active();
  std::vector<std::vector<double>> bus(channels, std::vector<double>(n, 0.0));

  for (std::size_t s = 0; s < scene_.sources.size(); ++s) {
    const auto x = source_signal(s);
    if (scene_.precise) {
      std::vector<FractionalDelayLine> lines;
      if (im.uses_delays)
        for (std::size_t c = 0; c < channels; ++c) lines.emplace_back(scene_.algorithm.max_delay * fs + 2.0);
      for (std::size_t i = 0; i < n; ++i) {
        const auto g = coefficients(s, static_cast<double>(i) / fs);
        for (std::size_t c = 0; c < channels; ++c)
          bus[c][i] += g.gains[c] * (im.uses_delays ? lines[c].process(x[i], g.delays[c] * fs) : x[i]);
      }
      continue;
    }

    std::vector<FractionalDelayLine> lines;
    if (im.uses_delays)
      for (std::size_t c = 0; c < channels; ++c) lines.emplace_back(scene_.algorithm.max_delay * fs + 2.0);
    GainVector prev;
    for (std::size_t start = 0; start < n; start += block) {
      const std::size_t len = std::min(block, n - start);
      const double centre = (static_cast<double>(start) + static_cast<double>(len) / 2.0) / fs;
      GainVector cur = coefficients(s, centre);
      if (start == 0) prev = cur;
      const double inv_len = 1.0 / static_cast<double>(len);
      for (std::size_t c = 0; c < channels; ++c) {
        const double g0 = prev.gains[c], g1 = cur.gains[c];
        if (!im.uses_delays) {
          if (g0 == 0.0 && g1 == 0.0) continue;
          kern.ramp_axpy(g0, (g1 - g0) * inv_len, x.data() + start, bus[c].data() + start, len);
          continue;
        }
        const double d0 = prev.delays[c] * fs, d1 = cur.delays[c] * fs;
        for (std::size_t k = 0; k < len; ++k) {
          const double u = static_cast<double>(k + 1) * inv_len;
          const double g = g0 + (g1 - g0) * u;
          const double d = d0 + (d1 - d0) * u;
          bus[c][start + k] += g * lines[c].process(x[start + k], d);
        }
      }
      prev = std::move(cur);
    }
  }

  RenderOutput out;
  out.audio.sample_rate = fs;
  switch (scene_.output.mode) {
  case OutputMode::Ambisonics:
    out.audio.channels = std::move(bus);
    out.ambisonic_format = im.format;
    break;
  case OutputMode::Speakers:
    if (im.ambisonic) out.audio.channels = decode(AmbisonicStream{im.format, fs, std::move(bus)}, *im.decoder);
    else out.audio.channels = std::move(bus);
    break;
  case OutputMode::Binaural: {
    const StereoSignal ears = im.ambisonic ? apply_filter_matrix(AmbisonicStream{im.format, fs, std::move(bus)},
                                                                 *im.filters, block)
                                           : binauralize_speaker_feeds(bus, im.hrirs, block);
    out.audio.channels = {ears.left, ears.right};
    break;
  }
  }
  return out;
}

} // namespace spatia
