#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include "spatia/geometry.hpp"

namespace spatia {

enum class ChannelOrdering { FuMa, ACN };
enum class ChannelNormalization { FuMa, SN3D };

std::string_view to_string(ChannelOrdering o) noexcept;
std::string_view to_string(ChannelNormalization n) noexcept;

/// Number of signals in a mixed-order #H#P set: (P+1)^2 + 2(H-P).
/// Throws ParameterError unless 0 <= P <= H.
std::size_t component_count(int horizontal_order, int periphonic_order);

/// Signal-set description: ordering/normalization tags plus horizontal order H
/// and periphonic order P. FuMa is only meaningful for H = P = 1 (W, X, Y, Z).
struct AmbisonicFormat {
  ChannelOrdering ordering = ChannelOrdering::ACN;
  ChannelNormalization normalization = ChannelNormalization::SN3D;
  int horizontal_order = 1;
  int periphonic_order = 1;

  static AmbisonicFormat fuma() { return {ChannelOrdering::FuMa, ChannelNormalization::FuMa, 1, 1}; }
  static AmbisonicFormat acn_sn3d(int h, int p) { return {ChannelOrdering::ACN, ChannelNormalization::SN3D, h, p}; }

  std::size_t component_count() const { return spatia::component_count(horizontal_order, periphonic_order); }
  bool is_fuma() const noexcept { return ordering == ChannelOrdering::FuMa; }
  /// Throws ParameterError for inconsistent tags or orders.
  void validate() const;
  friend bool operator==(const AmbisonicFormat&, const AmbisonicFormat&) = default;
};

/// Degree m >= 0, order 0 <= n <= m, sigma = +1 (cos n az) or -1 (sin n az).
struct SphericalHarmonicIndex {
  int degree = 0;
  int order = 0;
  int sigma = 1;

  /// Ambisonic channel number m^2 + m + sigma * n.
  int acn() const noexcept { return degree * degree + degree + sigma * order; }
  friend bool operator==(const SphericalHarmonicIndex&, const SphericalHarmonicIndex&) = default;
};

/// Component indices of an ACN/SN3D #H#P set in channel order: the full-sphere
/// block (degree <= P) in ACN order, then for each degree P < m <= H the
/// horizontal pair (m, m, +1), (m, m, -1).
std::vector<SphericalHarmonicIndex> component_indices(int horizontal_order, int periphonic_order);

/// Schmidt semi-normalized associated Legendre function P~_mn(x) without the
/// Condon-Shortley phase.
double legendre_sn3d(int degree, int order, double x);

/// Real SN3D spherical harmonic Y^sigma_mn(az, el) = P~_mn(sin el) * (cos|sin)(n az).
/// Throws ParameterError for an invalid index (including sigma = -1 with n = 0).
double spherical_harmonic(const SphericalHarmonicIndex& idx, const Direction& d);

struct AmbisonicFrame {
  AmbisonicFormat format;
  std::vector<double> components;
};

/// First-order B-format in FuMa convention: W = I/sqrt2, X, Y, Z as direction cosines.
AmbisonicFrame encode_foa(double input, const Direction& d);

/// Mixed-order ACN/SN3D encoding: input * Y_k(d) for every component of #H#P.
AmbisonicFrame encode_hoa(double input, const Direction& d, int horizontal_order, int periphonic_order);

/// Per-component gains for a unit source in any supported format.
std::vector<double> encoding_coefficients(const Direction& d, const AmbisonicFormat& format);

/// encode_hoa scaled by min(1, reference_distance / distance).
AmbisonicFrame encode_with_distance_gain(double input, const Direction& d, double distance,
                                         double reference_distance, int horizontal_order,
                                         int periphonic_order);
double distance_gain(double distance, double reference_distance);

/// FuMa WXYZ <-> ACN/SN3D (W, Y, Z, X) with W rescaled by sqrt2 or 1/sqrt2.
/// Throws UnsupportedOrderError for anything but a first-order frame.
AmbisonicFrame convert_fuma_acn(const AmbisonicFrame& frame);
AmbisonicFrame to_acn_sn3d(const AmbisonicFrame& frame);

/// Sound-field rotations for first-order frames (either convention; 2-D #1#0 sets
/// support rotate_z only). Each acts as a plane rotation on a pair of components:
///   rotate_z: X' = X cos a - Y sin a, Y' = X sin a + Y cos a
///   rotate_x: Y' = Y cos a - Z sin a, Z' = Y sin a + Z cos a
///   rotate_y: X' = X cos a - Z sin a, Z' = X sin a + Z cos a
/// so positive rotate_y lifts the front toward the zenith.
/// Throws UnsupportedOrderError above first order.
AmbisonicFrame rotate_z(const AmbisonicFrame& frame, double angle);
AmbisonicFrame rotate_x(const AmbisonicFrame& frame, double angle);
AmbisonicFrame rotate_y(const AmbisonicFrame& frame, double angle);

/// Multichannel Ambisonic signal: one channel per component, equal lengths.
struct AmbisonicStream {
  AmbisonicFormat format;
  double sample_rate = 48000.0;
  std::vector<std::vector<double>> channels;

  std::size_t frames() const noexcept { return channels.empty() ? 0 : channels.front().size(); }
  /// Throws DimensionError if the channel count or lengths are inconsistent.
  void validate() const;
};

AmbisonicStream to_acn_sn3d(const AmbisonicStream& stream);
AmbisonicStream to_fuma(const AmbisonicStream& stream);
void rotate_z(AmbisonicStream& stream, double angle);
void rotate_x(AmbisonicStream& stream, double angle);
void rotate_y(AmbisonicStream& stream, double angle);

enum class DecoderFlavour { Projection, Pseudoinverse };
std::string_view to_string(DecoderFlavour f) noexcept;
DecoderFlavour parse_decoder_flavour(std::string_view s);

/// L x K decoding matrix for an ACN/SN3D #H#P signal set.
class DecoderMatrix {
public:
  DecoderMatrix(LoudspeakerLayout layout, AmbisonicFormat format, DecoderFlavour flavour,
                std::vector<double> entries, std::vector<double> delays);

  std::size_t speakers() const noexcept { return layout_.size(); }
  std::size_t components() const noexcept { return components_; }
  double operator()(std::size_t speaker, std::size_t component) const {
    return entries_[speaker * components_ + component];
  }
  /// Row-major L x K entries.
  const std::vector<double>& entries() const noexcept { return entries_; }
  const LoudspeakerLayout& layout() const noexcept { return layout_; }
  const AmbisonicFormat& format() const noexcept { return format_; }
  DecoderFlavour flavour() const noexcept { return flavour_; }
  /// Per-speaker delay compensation in seconds (all zero for equidistant layouts).
  const std::vector<double>& delays() const noexcept { return delays_; }

private:
  LoudspeakerLayout layout_;
  AmbisonicFormat format_;
  DecoderFlavour flavour_;
  std::size_t components_ = 0;
  std::vector<double> entries_;
  std::vector<double> delays_;
};

/// Minimum speaker count accepted by build_decoder for a flavour.
std::size_t minimum_speakers(DecoderFlavour flavour, int horizontal_order, int periphonic_order);

/// Projection: D_ik = c_k Y_k(speaker i) / L, with c_k chosen so that a regular
/// layout reproduces the basic (sampling) decoder; pseudoinverse: Tikhonov-
/// regularized pinv of the speaker harmonic matrix (lambda = 1e-9 sigma_max).
/// Non-equidistant layouts need `delay_compensation`, which delays nearer speakers
/// by (max_dist - dist_i) / c.
DecoderMatrix build_decoder(const LoudspeakerLayout& layout, int horizontal_order, int periphonic_order,
                            DecoderFlavour flavour, bool delay_compensation = false);

/// Speaker feeds L = D * components for one frame (FuMa frames are converted).
std::vector<double> decode(const AmbisonicFrame& frame, const DecoderMatrix& decoder);

/// Speaker feeds for a whole stream, including any delay compensation.
std::vector<std::vector<double>> decode(const AmbisonicStream& stream, const DecoderMatrix& decoder);

} // namespace spatia
