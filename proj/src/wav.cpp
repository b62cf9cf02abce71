#include "spatia/wav.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>

#include <json.hpp>

namespace spatia {

static_assert(std::endian::native == std::endian::little, "WAV I/O assumes a little-endian host");

namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

template <typename T>
T read_le(const unsigned char* p) {
  T v;
  std::memcpy(&v, p, sizeof(T));
  return v;
}

template <typename T>
void put(std::string& out, T v) {
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out.append(buf, sizeof(T));
}

std::vector<unsigned char> slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::uint16_t bits_of(SampleFormat f) {
  switch (f) {
  case SampleFormat::Pcm16: return 16;
  case SampleFormat::Pcm24: return 24;
  case SampleFormat::Pcm32:
  case SampleFormat::Float32: return 32;
  case SampleFormat::Float64: return 64;
  }
  return 32;
}

bool is_float(SampleFormat f) { return f == SampleFormat::Float32 || f == SampleFormat::Float64; }

double pcm_scale(int bits) { return std::ldexp(1.0, bits - 1); }

} // namespace

SampleFormat parse_sample_format(std::string_view s) {
  if (s == "pcm16") return SampleFormat::Pcm16;
  if (s == "pcm24") return SampleFormat::Pcm24;
  if (s == "pcm32") return SampleFormat::Pcm32;
  if (s == "float32") return SampleFormat::Float32;
  if (s == "float64") return SampleFormat::Float64;
  throw ParameterError("unknown sample format '" + std::string(s) + "'");
}

AudioBuffer read_wav(const std::filesystem::path& path) {
  const auto data = slurp(path);
  const std::string name = "'" + path.string() + "'";
  if (data.size() < 12 || std::memcmp(data.data(), "RIFF", 4) != 0 || std::memcmp(data.data() + 8, "WAVE", 4) != 0)
    throw FormatError(name + " is not a RIFF/WAVE file");

  std::uint16_t tag = 0, channels = 0, bits = 0, block_align = 0;
  std::uint32_t rate = 0;
  const unsigned char* samples = nullptr;
  std::size_t sample_bytes = 0;
  bool have_fmt = false;

  std::size_t pos = 12;
  while (pos + 8 <= data.size()) {
    const unsigned char* chunk = data.data() + pos;
    const auto size = read_le<std::uint32_t>(chunk + 4);
    const std::size_t body = pos + 8;
    const std::size_t avail = std::min<std::size_t>(size, data.size() - body);
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (avail < 16) throw FormatError(name + ": truncated fmt chunk");
      const unsigned char* f = data.data() + body;
      tag = read_le<std::uint16_t>(f);
      channels = read_le<std::uint16_t>(f + 2);
      rate = read_le<std::uint32_t>(f + 4);
      block_align = read_le<std::uint16_t>(f + 12);
      bits = read_le<std::uint16_t>(f + 14);
      if (tag == kFormatExtensible) {
        if (avail < 40) throw FormatError(name + ": truncated WAVE_FORMAT_EXTENSIBLE header");
        tag = read_le<std::uint16_t>(f + 24); // first two bytes of the subformat GUID
      }
      have_fmt = true;
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      samples = data.data() + body;
      sample_bytes = avail;
    }
    pos = body + size + (size & 1u);
  }
  if (!have_fmt) throw FormatError(name + " has no fmt chunk");
  if (samples == nullptr) throw FormatError(name + " has no data chunk");
  if (channels == 0) throw FormatError(name + " declares zero channels");
  const bool ok_pcm = tag == kFormatPcm && (bits == 16 || bits == 24 || bits == 32);
  const bool ok_float = tag == kFormatFloat && (bits == 32 || bits == 64);
  if (!ok_pcm && !ok_float)
    throw FormatError(name + ": unsupported encoding (format tag " + std::to_string(tag) + ", " +
                      std::to_string(bits) + " bits)");
  const std::size_t bytes = bits / 8u;
  if (block_align != channels * bytes) throw FormatError(name + ": inconsistent block alignment");

  AudioBuffer out;
  out.sample_rate = rate;
  const std::size_t frames = sample_bytes / block_align;
  out.channels.assign(channels, std::vector<double>(frames));
  for (std::size_t n = 0; n < frames; ++n) {
    for (std::size_t c = 0; c < channels; ++c) {
      const unsigned char* p = samples + n * block_align + c * bytes;
      double v = 0.0;
      if (ok_float) {
        v = bits == 32 ? static_cast<double>(read_le<float>(p)) : read_le<double>(p);
      } else if (bits == 16) {
        v = read_le<std::int16_t>(p) / pcm_scale(16);
      } else if (bits == 24) {
        std::int32_t s = static_cast<std::int32_t>(p[0]) | (static_cast<std::int32_t>(p[1]) << 8) |
                         (static_cast<std::int32_t>(static_cast<std::int8_t>(p[2])) << 16);
        v = s / pcm_scale(24);
      } else {
        v = read_le<std::int32_t>(p) / pcm_scale(32);
      }
      out.channels[c][n] = v;
    }
  }
  return out;
}

void write_wav(const std::filesystem::path& path, const AudioBuffer& audio, SampleFormat format) {
  if (audio.channels.empty()) throw DimensionError("cannot write a file with no channels");
  if (audio.channels.size() > 0xFFFF) throw DimensionError("too many channels for a WAV file");
  const std::size_t frames = audio.frames();
  for (const auto& ch : audio.channels)
    if (ch.size() != frames) throw DimensionError("channels have unequal lengths");
  if (!(audio.sample_rate > 0.0) || audio.sample_rate > 4294967295.0 || audio.sample_rate != std::floor(audio.sample_rate))
    throw ParameterError("sample rate must be a positive integer");

  const auto channels = static_cast<std::uint16_t>(audio.channels.size());
  const std::uint16_t bits = bits_of(format);
  const std::uint16_t block_align = static_cast<std::uint16_t>(channels * (bits / 8));
  const std::uint64_t data_bytes = static_cast<std::uint64_t>(frames) * block_align;
  if (data_bytes > 0xFFFFFFFFull - 64) throw ParameterError("audio too long for a RIFF/WAVE file");

  std::string out;
  out.reserve(static_cast<std::size_t>(data_bytes) + 64);
  out += "RIFF";
  put<std::uint32_t>(out, static_cast<std::uint32_t>(4 + 8 + 16 + 8 + data_bytes));
  out += "WAVEfmt ";
  put<std::uint32_t>(out, 16);
  put<std::uint16_t>(out, is_float(format) ? kFormatFloat : kFormatPcm);
  put<std::uint16_t>(out, channels);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(audio.sample_rate));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(audio.sample_rate) * block_align);
  put<std::uint16_t>(out, block_align);
  put<std::uint16_t>(out, bits);
  out += "data";
  put<std::uint32_t>(out, static_cast<std::uint32_t>(data_bytes));

  for (std::size_t n = 0; n < frames; ++n) {
    for (const auto& ch : audio.channels) {
      const double v = ch[n];
      switch (format) {
      case SampleFormat::Float32: put<float>(out, static_cast<float>(v)); break;
      case SampleFormat::Float64: put<double>(out, v); break;
      default: {
        const double scale = pcm_scale(bits);
        const double q = std::clamp(std::round(v * scale), -scale, scale - 1.0);
        const auto s = static_cast<std::int32_t>(q);
        if (bits == 16) {
          put<std::int16_t>(out, static_cast<std::int16_t>(s));
        } else if (bits == 24) {
          const auto u = static_cast<std::uint32_t>(s);
          out.push_back(static_cast<char>(u & 0xFF));
          out.push_back(static_cast<char>((u >> 8) & 0xFF));
          out.push_back(static_cast<char>((u >> 16) & 0xFF));
        } else {
          put<std::int32_t>(out, s);
        }
      }
      }
    }
  }

  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open '" + path.string() + "' for writing");
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) throw IoError("failed writing '" + path.string() + "'");
}

std::filesystem::path ambisonic_sidecar_path(const std::filesystem::path& audio_path) {
  auto p = audio_path;
  p.replace_extension(".ambi.json");
  return p;
}

AmbisonicStream read_ambisonic(const std::filesystem::path& path) {
  AudioBuffer audio = read_wav(path);
  AmbisonicStream stream;
  stream.sample_rate = audio.sample_rate;
  const auto sidecar = ambisonic_sidecar_path(path);
  if (std::filesystem::exists(sidecar)) {
    std::ifstream in(sidecar);
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(in);
      const auto ordering = doc.at("ordering").get<std::string>();
      const auto normalization = doc.at("normalization").get<std::string>();
      if (ordering == "FuMa") stream.format.ordering = ChannelOrdering::FuMa;
      else if (ordering == "ACN") stream.format.ordering = ChannelOrdering::ACN;
      else throw FormatError("unknown ordering '" + ordering + "'");
      if (normalization == "FuMa") stream.format.normalization = ChannelNormalization::FuMa;
      else if (normalization == "SN3D") stream.format.normalization = ChannelNormalization::SN3D;
      else throw FormatError("unknown normalization '" + normalization + "'");
      stream.format.horizontal_order = doc.at("H").get<int>();
      stream.format.periphonic_order = doc.at("P").get<int>();
    } catch (const nlohmann::json::exception& e) {
      throw FormatError("invalid sidecar '" + sidecar.string() + "': " + e.what());
    }
    stream.format.validate();
  } else if (audio.channels.size() == 4) {
    stream.format = AmbisonicFormat::fuma();
  } else {
    throw FormatError("'" + path.string() + "' has " + std::to_string(audio.channels.size()) +
                      " channels and no " + sidecar.filename().string() + " sidecar describing them");
  }
  stream.channels = std::move(audio.channels);
  stream.validate();
  return stream;
}

void write_ambisonic(const std::filesystem::path& path, const AmbisonicStream& stream, SampleFormat format) {
  stream.validate();
  write_wav(path, AudioBuffer{stream.sample_rate, stream.channels}, format);
  const nlohmann::json doc{{"ordering", std::string(to_string(stream.format.ordering))},
                           {"normalization", std::string(to_string(stream.format.normalization))},
                           {"H", stream.format.horizontal_order},
                           {"P", stream.format.periphonic_order}};
  const auto sidecar = ambisonic_sidecar_path(path);
  std::ofstream f(sidecar, std::ios::trunc);
  if (!f) throw IoError("cannot write '" + sidecar.string() + "'");
  f << doc.dump(2) << '\n';
}

} // namespace spatia
