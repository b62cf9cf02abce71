#pragma once

#include <filesystem>
#include <vector>

#include "spatia/ambisonics.hpp"

namespace spatia {

enum class SampleFormat { Pcm16, Pcm24, Pcm32, Float32, Float64 };

/// Parses "pcm16", "pcm24", "pcm32", "float32", "float64".
SampleFormat parse_sample_format(std::string_view s);

struct AudioBuffer {
  double sample_rate = 48000.0;
  std::vector<std::vector<double>> channels;

  std::size_t frames() const noexcept { return channels.empty() ? 0 : channels.front().size(); }
};

/// RIFF/WAVE reader: integer PCM (16/24/32 bit) and IEEE float (32/64 bit),
/// including WAVE_FORMAT_EXTENSIBLE headers. Throws IoError / FormatError.
AudioBuffer read_wav(const std::filesystem::path& path);

/// Throws DimensionError for ragged channels, IoError when the file cannot be written.
void write_wav(const std::filesystem::path& path, const AudioBuffer& audio,
               SampleFormat format = SampleFormat::Float32);

/// "<stem>.ambi.json" next to the audio file.
std::filesystem::path ambisonic_sidecar_path(const std::filesystem::path& audio_path);

/// Reads an Ambisonic file. The sidecar supplies ordering, normalization, H and P;
/// without one, a 4-channel file is taken as FuMa B-format and anything else is
/// a FormatError.
AmbisonicStream read_ambisonic(const std::filesystem::path& path);
void write_ambisonic(const std::filesystem::path& path, const AmbisonicStream& stream,
                     SampleFormat format = SampleFormat::Float32);

} // namespace spatia
