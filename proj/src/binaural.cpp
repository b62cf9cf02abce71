#include "spatia/binaural.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "spatia/convolution.hpp"
#include "spatia/kernels.hpp"

namespace spatia {

void BinauralFilterMatrix::validate() const {
  if (left.empty() || left.size() != right.size()) throw DimensionError("filter matrix needs two equal-size rows");
  format.validate();
  if (left.size() != format.component_count())
    throw DimensionError("filter matrix has " + std::to_string(left.size()) + " columns, format needs " +
                         std::to_string(format.component_count()));
  const std::size_t t = taps();
  if (t == 0) throw ParameterError("filter responses must have at least one tap");
  for (std::size_t k = 0; k < left.size(); ++k) {
    if (left[k].size() != t || right[k].size() != t) throw DimensionError("filter responses differ in length");
    for (std::size_t n = 0; n < t; ++n)
      if (!std::isfinite(left[k][n]) || !std::isfinite(right[k][n]))
        throw ParameterError("filter matrix has non-finite taps");
  }
}

std::vector<Hrir> hrirs_for_layout(const HrirSet& set, const LoudspeakerLayout& layout) {
  std::vector<Hrir> out;
  out.reserve(layout.size());
  for (std::size_t i = 0; i < layout.size(); ++i) out.push_back(nearest_hrir(set, layout.direction(i)));
  return out;
}

namespace {

void check_block(std::size_t block_size) {
  if (block_size == 0) throw ParameterError("block size must be positive");
}

void check_hrirs(const DecoderMatrix& decoder, std::span<const Hrir> hrirs) {
  if (hrirs.size() != decoder.speakers())
    throw DimensionError("decoder has " + std::to_string(decoder.speakers()) + " speakers but " +
                         std::to_string(hrirs.size()) + " HRIRs were given");
  for (const auto& h : hrirs) h.validate();
}

// Sums conv(inputs[j], filters[j]) over j, processed in blocks.
std::vector<double> filter_and_sum(const std::vector<std::vector<double>>& inputs,
                                   const std::vector<std::vector<double>>& filters, std::size_t block_size) {
  const std::size_t n = inputs.empty() ? 0 : inputs.front().size();
  std::vector<double> out(n, 0.0);
  std::vector<BlockConvolver> conv;
  conv.reserve(filters.size());
  for (const auto& f : filters) conv.emplace_back(f);
  for (std::size_t start = 0; start < n; start += block_size) {
    const std::size_t len = std::min(block_size, n - start);
    std::span<double> dst(out.data() + start, len);
    for (std::size_t j = 0; j < inputs.size(); ++j)
      conv[j].process_add(std::span<const double>(inputs[j].data() + start, len), dst);
  }
  return out;
}

std::vector<double> padded(const std::vector<double>& h, std::size_t taps) {
  std::vector<double> out(h);
  out.resize(taps, 0.0);
  return out;
}

} // namespace

StereoSignal binauralize_speaker_feeds(const std::vector<std::vector<double>>& feeds,
                                       std::span<const Hrir> speaker_hrirs, std::size_t block_size) {
  check_block(block_size);
  if (feeds.size() != speaker_hrirs.size())
    throw DimensionError(std::to_string(feeds.size()) + " speaker feeds but " + std::to_string(speaker_hrirs.size()) +
                         " HRIRs");
  std::vector<std::vector<double>> hl, hr;
  for (const auto& h : speaker_hrirs) {
    h.validate();
    hl.push_back(h.left);
    hr.push_back(h.right);
  }
  return {filter_and_sum(feeds, hl, block_size), filter_and_sum(feeds, hr, block_size)};
}

StereoSignal binaural_decode_virtual_speakers(const AmbisonicStream& stream, const DecoderMatrix& decoder,
                                              std::span<const Hrir> speaker_hrirs, std::size_t block_size) {
  check_block(block_size);
  check_hrirs(decoder, speaker_hrirs);
  return binauralize_speaker_feeds(decode(stream, decoder), speaker_hrirs, block_size);
}

BinauralFilterMatrix precompute_filter_matrix(const DecoderMatrix& decoder, std::span<const Hrir> speaker_hrirs) {
  check_hrirs(decoder, speaker_hrirs);
  std::size_t taps = 0;
  for (const auto& h : speaker_hrirs) taps = std::max(taps, h.taps());
  const std::size_t k_count = decoder.components();
  BinauralFilterMatrix f;
  f.format = decoder.format();
  f.derivation = FilterDerivation::VirtualSpeakers;
  f.left.assign(k_count, std::vector<double>(taps, 0.0));
  f.right.assign(k_count, std::vector<double>(taps, 0.0));
  const auto& kern = kernels::active();
  for (std::size_t k = 0; k < k_count; ++k) {
    for (std::size_t i = 0; i < decoder.speakers(); ++i) {
      const double d = decoder(i, k);
      const auto& h = speaker_hrirs[i];
      kern.axpy(d, h.left.data(), f.left[k].data(), h.taps());
      kern.axpy(d, h.right.data(), f.right[k].data(), h.taps());
    }
  }
  return f;
}

StereoSignal apply_filter_matrix(const AmbisonicStream& stream, const BinauralFilterMatrix& filters,
                                 std::size_t block_size) {
  check_block(block_size);
  filters.validate();
  const AmbisonicStream s = to_acn_sn3d(stream);
  if (!(s.format == filters.format))
    throw DimensionError("stream has " + std::to_string(s.channels.size()) +
                         " components but the filter matrix expects " + std::to_string(filters.components()));
  return {filter_and_sum(s.channels, filters.left, block_size), filter_and_sum(s.channels, filters.right, block_size)};
}

BinauralFilterMatrix solve_filter_least_squares(std::span<const Direction> directions, std::span<const Hrir> hrirs,
                                                bool symmetric_head) {
  const std::size_t n = directions.size();
  if (n < 4) throw ParameterError("least-squares filter design needs at least 4 source directions");
  if (hrirs.size() != n)
    throw DimensionError(std::to_string(n) + " directions but " + std::to_string(hrirs.size()) + " HRIRs");
  std::size_t taps = 0;
  for (const auto& h : hrirs) {
    h.validate();
    taps = std::max(taps, h.taps());
  }
  const auto format = AmbisonicFormat::acn_sn3d(1, 1);
  const std::size_t k_count = format.component_count();

  Eigen::MatrixXd b(k_count, n); // contribution of each source to each component
  for (std::size_t j = 0; j < n; ++j) {
    const auto c = encoding_coefficients(directions[j], format);
    for (std::size_t k = 0; k < k_count; ++k) b(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j)) = c[k];
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(b, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sigma = svd.singularValues();
  const double ratio = sigma(sigma.size() - 1) / sigma(0);
  if (!(ratio >= 1e-10))
    throw ConditioningError("source directions do not span the first-order components (singular value ratio " +
                            std::to_string(ratio) + ")");
  Eigen::VectorXd inv = sigma.cwiseInverse();
  const Eigen::MatrixXd pinv = svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose(); // n x K

  auto fit = [&](bool left_ear) {
    Eigen::MatrixXd h(taps, n);
    for (std::size_t j = 0; j < n; ++j) {
      const auto resp = padded(left_ear ? hrirs[j].left : hrirs[j].right, taps);
      for (std::size_t t = 0; t < taps; ++t)
        h(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(j)) = resp[t];
    }
    const Eigen::MatrixXd f = h * pinv; // taps x K
    std::vector<std::vector<double>> out(k_count, std::vector<double>(taps));
    for (std::size_t k = 0; k < k_count; ++k)
      for (std::size_t t = 0; t < taps; ++t)
        out[k][t] = f(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(k));
    return out;
  };

  BinauralFilterMatrix f;
  f.format = format;
  f.derivation = FilterDerivation::LeastSquares;
  f.left = fit(true);
  if (symmetric_head) {
    f.right = f.left;
    const auto indices = component_indices(1, 1);
    for (std::size_t k = 0; k < k_count; ++k)
      if (indices[k].sigma == -1)
        for (double& v : f.right[k]) v = -v;
  } else {
    f.right = fit(false);
  }
  return f;
}

void compensate_head_rotation(AmbisonicStream& stream, double head_yaw) { rotate_z(stream, -head_yaw); }

} // namespace spatia
