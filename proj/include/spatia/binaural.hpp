#pragma once

#include <span>
#include <vector>

#include "spatia/ambisonics.hpp"
#include "spatia/hrir.hpp"

namespace spatia {

struct StereoSignal {
  std::vector<double> left;
  std::vector<double> right;
};

enum class FilterDerivation { VirtualSpeakers, LeastSquares };

/// 2 x K impulse responses mapping Ambisonic components to the ears.
struct BinauralFilterMatrix {
  AmbisonicFormat format;
  FilterDerivation derivation = FilterDerivation::VirtualSpeakers;
  std::vector<std::vector<double>> left;  ///< K responses
  std::vector<std::vector<double>> right; ///< K responses

  std::size_t components() const noexcept { return left.size(); }
  std::size_t taps() const noexcept { return left.empty() ? 0 : left.front().size(); }
  /// Throws DimensionError / ParameterError on ragged or non-finite responses.
  void validate() const;
};

/// Nearest HRIR for every speaker of `layout`, in speaker order.
std::vector<Hrir> hrirs_for_layout(const HrirSet& set, const LoudspeakerLayout& layout);

inline constexpr std::size_t kDefaultBlockSize = 256;

/// Decode to virtual speaker feeds, then convolve each feed with its speaker's
/// HRIR pair and sum per ear. Output has the stream's length.
StereoSignal binaural_decode_virtual_speakers(const AmbisonicStream& stream, const DecoderMatrix& decoder,
                                              std::span<const Hrir> speaker_hrirs,
                                              std::size_t block_size = kDefaultBlockSize);

/// Convolves each speaker feed with its HRIR pair and sums per ear.
StereoSignal binauralize_speaker_feeds(const std::vector<std::vector<double>>& feeds,
                                       std::span<const Hrir> speaker_hrirs,
                                       std::size_t block_size = kDefaultBlockSize);

/// F_{e,k} = sum_i D_{i,k} H_{i,e}; responses are zero-padded to the longest HRIR.
BinauralFilterMatrix precompute_filter_matrix(const DecoderMatrix& decoder, std::span<const Hrir> speaker_hrirs);

/// Convolves each component with its filter pair and sums per ear.
StereoSignal apply_filter_matrix(const AmbisonicStream& stream, const BinauralFilterMatrix& filters,
                                 std::size_t block_size = kDefaultBlockSize);

/// First-order filters minimizing |H - F B|^2 per tap, where B holds the ACN/SN3D
/// contributions of the n >= 4 source directions. With `symmetric_head` only the
/// left responses are fitted and the right filters mirror them with the Y
/// component negated. Throws ConditioningError for a rank-deficient direction set.
BinauralFilterMatrix solve_filter_least_squares(std::span<const Direction> directions, std::span<const Hrir> hrirs,
                                                bool symmetric_head = false);

/// Counter-rotates a first-order stream about z by the head yaw.
void compensate_head_rotation(AmbisonicStream& stream, double head_yaw);

} // namespace spatia
