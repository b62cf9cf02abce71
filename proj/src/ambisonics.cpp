#include "spatia/ambisonics.hpp"

#include <algorithm>
#include <string>

#include <Eigen/Dense>

#include "spatia/dsp.hpp"
#include "spatia/kernels.hpp"

namespace spatia {

std::string_view to_string(ChannelOrdering o) noexcept { return o == ChannelOrdering::FuMa ? "FuMa" : "ACN"; }
std::string_view to_string(ChannelNormalization n) noexcept {
  return n == ChannelNormalization::FuMa ? "FuMa" : "SN3D";
}

std::size_t component_count(int h, int p) {
  if (p < 0 || h < p) throw ParameterError("mixed order requires 0 <= P <= H");
  return static_cast<std::size_t>((p + 1) * (p + 1) + 2 * (h - p));
}

void AmbisonicFormat::validate() const {
  if (periphonic_order < 0 || horizontal_order < periphonic_order)
    throw ParameterError("mixed order requires 0 <= P <= H");
  const bool fuma_order = ordering == ChannelOrdering::FuMa;
  const bool fuma_norm = normalization == ChannelNormalization::FuMa;
  if (fuma_order != fuma_norm) throw ParameterError("FuMa ordering and normalization must be used together");
  if (fuma_order && (horizontal_order != 1 || periphonic_order != 1))
    throw ParameterError("FuMa signal sets are first order (H = P = 1) only");
}

std::vector<SphericalHarmonicIndex> component_indices(int h, int p) {
  component_count(h, p); // validates
  std::vector<SphericalHarmonicIndex> out;
  for (int m = 0; m <= p; ++m) {
    for (int n = m; n >= 1; --n) out.push_back({m, n, -1});
    out.push_back({m, 0, 1});
    for (int n = 1; n <= m; ++n) out.push_back({m, n, 1});
  }
  for (int m = p + 1; m <= h; ++m) {
    out.push_back({m, m, 1});
    out.push_back({m, m, -1});
  }
  return out;
}

namespace {

// Associated Legendre P_m^n(x) without Condon-Shortley phase; s = sqrt(1 - x^2).
double legendre(int m, int n, double x, double s) {
  double pnn = 1.0;
  for (int i = 1; i <= n; ++i) pnn *= static_cast<double>(2 * i - 1) * s;
  if (m == n) return pnn;
  double prev = pnn;
  double cur = x * static_cast<double>(2 * n + 1) * pnn;
  for (int l = n + 2; l <= m; ++l) {
    const double next = (static_cast<double>(2 * l - 1) * x * cur - static_cast<double>(l + n - 1) * prev) /
                        static_cast<double>(l - n);
    prev = cur;
    cur = next;
  }
  return cur;
}

double sn3d_factor(int m, int n) {
  // sqrt((2 - delta_n0) (m - n)! / (m + n)!)
  double ratio = 1.0;
  for (int i = m - n + 1; i <= m + n; ++i) ratio /= static_cast<double>(i);
  return std::sqrt((n == 0 ? 1.0 : 2.0) * ratio);
}

void check_index(const SphericalHarmonicIndex& idx) {
  if (idx.degree < 0 || idx.order < 0 || idx.order > idx.degree || (idx.sigma != 1 && idx.sigma != -1) ||
      (idx.order == 0 && idx.sigma != 1))
    throw ParameterError("invalid spherical harmonic index (m=" + std::to_string(idx.degree) +
                         ", n=" + std::to_string(idx.order) + ", sigma=" + std::to_string(idx.sigma) + ")");
}

double harmonic(const SphericalHarmonicIndex& idx, double az, double sin_el, double cos_el) {
  const double p = sn3d_factor(idx.degree, idx.order) * legendre(idx.degree, idx.order, sin_el, cos_el);
  if (idx.order == 0) return p;
  const double angle = static_cast<double>(idx.order) * az;
  return p * (idx.sigma == 1 ? std::cos(angle) : std::sin(angle));
}

struct FoaSlots {
  int w = 0, x = -1, y = -1, z = -1;
};

FoaSlots foa_slots(const AmbisonicFormat& f) {
  f.validate();
  if (f.horizontal_order > 1)
    throw UnsupportedOrderError("sound-field rotation is implemented for first-order signals only (got H=" +
                                std::to_string(f.horizontal_order) + ")");
  if (f.horizontal_order == 0) return {};
  if (f.is_fuma()) return {0, 1, 2, 3};
  if (f.periphonic_order == 1) return {0, 3, 1, 2};
  return {0, 1, 2, -1};
}

void check_frame(const AmbisonicFrame& frame) {
  frame.format.validate();
  if (frame.components.size() != frame.format.component_count())
    throw DimensionError("frame has " + std::to_string(frame.components.size()) + " components, format needs " +
                         std::to_string(frame.format.component_count()));
}

AmbisonicFrame rotate_pair(const AmbisonicFrame& frame, double angle, int a, int b) {
  check_frame(frame);
  AmbisonicFrame out = frame;
  if (a < 0 || b < 0) return out;
  const double c = std::cos(angle), s = std::sin(angle);
  const double va = frame.components[static_cast<std::size_t>(a)];
  const double vb = frame.components[static_cast<std::size_t>(b)];
  out.components[static_cast<std::size_t>(a)] = c * va - s * vb;
  out.components[static_cast<std::size_t>(b)] = s * va + c * vb;
  return out;
}

void rotate_stream_pair(AmbisonicStream& stream, double angle, int a, int b) {
  stream.validate();
  if (a < 0 || b < 0) return;
  kernels::active().rotate_pair(std::cos(angle), std::sin(angle), stream.channels[static_cast<std::size_t>(a)].data(),
                                stream.channels[static_cast<std::size_t>(b)].data(), stream.frames());
}

void require_3d(const FoaSlots& s) {
  if (s.z < 0 && s.x >= 0)
    throw UnsupportedOrderError("horizontal-only signal sets can only be rotated about the z axis");
}

} // namespace

double legendre_sn3d(int degree, int order, double x) {
  check_index({degree, order, 1});
  if (!(x >= -1.0 && x <= 1.0)) throw ParameterError("Legendre argument must lie in [-1, 1]");
  return sn3d_factor(degree, order) * legendre(degree, order, x, std::sqrt((1.0 - x) * (1.0 + x)));
}

double spherical_harmonic(const SphericalHarmonicIndex& idx, const Direction& d) {
  check_index(idx);
  return harmonic(idx, d.azimuth(), std::sin(d.elevation()), std::cos(d.elevation()));
}

AmbisonicFrame encode_foa(double input, const Direction& d) {
  if (!std::isfinite(input)) throw ParameterError("input sample must be finite");
  const double th = d.azimuth(), ph = d.elevation();
  return {AmbisonicFormat::fuma(),
          {input / std::sqrt(2.0), input * std::cos(th) * std::cos(ph), input * std::sin(th) * std::cos(ph),
           input * std::sin(ph)}};
}

std::vector<double> encoding_coefficients(const Direction& d, const AmbisonicFormat& format) {
  format.validate();
  if (format.is_fuma()) return encode_foa(1.0, d).components;
  const double se = std::sin(d.elevation()), ce = std::cos(d.elevation());
  std::vector<double> out;
  for (const auto& idx : component_indices(format.horizontal_order, format.periphonic_order))
    out.push_back(harmonic(idx, d.azimuth(), se, ce));
  return out;
}

AmbisonicFrame encode_hoa(double input, const Direction& d, int h, int p) {
  if (!std::isfinite(input)) throw ParameterError("input sample must be finite");
  const auto format = AmbisonicFormat::acn_sn3d(h, p);
  auto coeffs = encoding_coefficients(d, format);
  for (double& c : coeffs) c *= input;
  return {format, std::move(coeffs)};
}

double distance_gain(double distance, double reference_distance) {
  if (!(distance > 0.0)) throw ParameterError("source distance must be positive");
  if (!(reference_distance > 0.0)) throw ParameterError("reference distance must be positive");
  return std::min(1.0, reference_distance / distance);
}

AmbisonicFrame encode_with_distance_gain(double input, const Direction& d, double distance,
                                         double reference_distance, int h, int p) {
  return encode_hoa(input * distance_gain(distance, reference_distance), d, h, p);
}

AmbisonicFrame convert_fuma_acn(const AmbisonicFrame& frame) {
  check_frame(frame);
  const auto& f = frame.format;
  if (f.horizontal_order != 1 || f.periphonic_order != 1)
    throw UnsupportedOrderError("FuMa conversion is defined for first-order (4-component) frames only");
  const auto& c = frame.components;
  if (f.is_fuma()) return {AmbisonicFormat::acn_sn3d(1, 1), {std::sqrt(2.0) * c[0], c[2], c[3], c[1]}};
  return {AmbisonicFormat::fuma(), {c[0] / std::sqrt(2.0), c[3], c[1], c[2]}};
}

AmbisonicFrame to_acn_sn3d(const AmbisonicFrame& frame) {
  return frame.format.is_fuma() ? convert_fuma_acn(frame) : frame;
}

AmbisonicFrame rotate_z(const AmbisonicFrame& frame, double angle) {
  const auto s = foa_slots(frame.format);
  return rotate_pair(frame, angle, s.x, s.y);
}

AmbisonicFrame rotate_x(const AmbisonicFrame& frame, double angle) {
  const auto s = foa_slots(frame.format);
  require_3d(s);
  return rotate_pair(frame, angle, s.y, s.z);
}

AmbisonicFrame rotate_y(const AmbisonicFrame& frame, double angle) {
  const auto s = foa_slots(frame.format);
  require_3d(s);
  return rotate_pair(frame, angle, s.x, s.z);
}

void AmbisonicStream::validate() const {
  format.validate();
  if (channels.size() != format.component_count())
    throw DimensionError("stream has " + std::to_string(channels.size()) + " channels, format needs " +
                         std::to_string(format.component_count()));
  for (const auto& ch : channels)
    if (ch.size() != frames()) throw DimensionError("stream channels have unequal lengths");
}

AmbisonicStream to_acn_sn3d(const AmbisonicStream& stream) {
  stream.validate();
  if (!stream.format.is_fuma()) return stream;
  AmbisonicStream out{AmbisonicFormat::acn_sn3d(1, 1), stream.sample_rate, {}};
  const auto& c = stream.channels;
  out.channels = {c[0], c[2], c[3], c[1]};
  for (double& v : out.channels[0]) v *= std::sqrt(2.0);
  return out;
}

AmbisonicStream to_fuma(const AmbisonicStream& stream) {
  stream.validate();
  if (stream.format.is_fuma()) return stream;
  if (stream.format.horizontal_order != 1 || stream.format.periphonic_order != 1)
    throw UnsupportedOrderError("FuMa conversion is defined for first-order (4-component) streams only");
  AmbisonicStream out{AmbisonicFormat::fuma(), stream.sample_rate, {}};
  const auto& c = stream.channels;
  out.channels = {c[0], c[3], c[1], c[2]};
  for (double& v : out.channels[0]) v /= std::sqrt(2.0);
  return out;
}

void rotate_z(AmbisonicStream& stream, double angle) {
  const auto s = foa_slots(stream.format);
  rotate_stream_pair(stream, angle, s.x, s.y);
}

void rotate_x(AmbisonicStream& stream, double angle) {
  const auto s = foa_slots(stream.format);
  require_3d(s);
  rotate_stream_pair(stream, angle, s.y, s.z);
}

void rotate_y(AmbisonicStream& stream, double angle) {
  const auto s = foa_slots(stream.format);
  require_3d(s);
  rotate_stream_pair(stream, angle, s.x, s.z);
}

// ---------------------------------------------------------------------------
// Decoding

std::string_view to_string(DecoderFlavour f) noexcept {
  return f == DecoderFlavour::Projection ? "projection" : "pseudoinverse";
}

DecoderFlavour parse_decoder_flavour(std::string_view s) {
  if (s == "projection") return DecoderFlavour::Projection;
  if (s == "pseudoinverse" || s == "pinv") return DecoderFlavour::Pseudoinverse;
  throw ParameterError("unknown decoder flavour '" + std::string(s) + "'");
}

DecoderMatrix::DecoderMatrix(LoudspeakerLayout layout, AmbisonicFormat format, DecoderFlavour flavour,
                             std::vector<double> entries, std::vector<double> delays)
    : layout_(std::move(layout)), format_(format), flavour_(flavour), entries_(std::move(entries)),
      delays_(std::move(delays)) {
  format_.validate();
  if (format_.is_fuma()) throw ParameterError("decoder matrices operate on ACN/SN3D signal sets");
  components_ = format_.component_count();
  if (entries_.size() != layout_.size() * components_)
    throw DimensionError("decoder entry count does not match speakers x components");
  if (delays_.empty()) delays_.assign(layout_.size(), 0.0);
  if (delays_.size() != layout_.size()) throw DimensionError("decoder needs one delay per speaker");
  for (double e : entries_)
    if (!std::isfinite(e)) throw ConditioningError("decoder matrix has non-finite entries");
}

std::size_t minimum_speakers(DecoderFlavour flavour, int h, int p) {
  const std::size_t k = component_count(h, p);
  return flavour == DecoderFlavour::Projection ? k + 1 : k;
}

DecoderMatrix build_decoder(const LoudspeakerLayout& layout, int h, int p, DecoderFlavour flavour,
                            bool delay_compensation) {
  const auto format = AmbisonicFormat::acn_sn3d(h, p);
  format.validate();
  const std::size_t k_count = format.component_count();
  const std::size_t l_count = layout.size();
  const std::size_t needed = minimum_speakers(flavour, h, p);
  if (l_count < needed)
    throw LayoutError(std::string(to_string(flavour)) + " decoder for #" + std::to_string(h) + "#" +
                      std::to_string(p) + " (" + std::to_string(k_count) + " signals) needs at least " +
                      std::to_string(needed) + " speakers" +
                      (flavour == DecoderFlavour::Projection ? " (one more than the number of signals)" : "") +
                      ", layout '" + layout.name + "' has " + std::to_string(l_count));
  auto report = validate_layout(layout);
  if (report.has("zero_distance") || report.has("non_finite") || report.has("duplicate_position"))
    throw LayoutError("layout '" + layout.name + "' is not decodable: " + report.summary());

  std::vector<double> delays(l_count, 0.0);
  if (!layout.is_equidistant()) {
    if (!delay_compensation)
      throw LayoutError("layout '" + layout.name +
                        "' is not equidistant; enable delay compensation to decode it");
    const auto dist = layout.distances();
    const double far = *std::max_element(dist.begin(), dist.end());
    for (std::size_t i = 0; i < l_count; ++i) delays[i] = (far - dist[i]) / kSpeedOfSound;
  }

  const auto indices = component_indices(h, p);
  const auto dirs = layout.directions();
  Eigen::MatrixXd y(k_count, l_count);
  for (std::size_t i = 0; i < l_count; ++i)
    for (std::size_t k = 0; k < k_count; ++k)
      y(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(i)) = spherical_harmonic(indices[k], dirs[i]);

  std::vector<double> entries(l_count * k_count);
  if (flavour == DecoderFlavour::Projection) {
    std::vector<double> weight(k_count);
    for (std::size_t k = 0; k < k_count; ++k) {
      const int m = indices[k].degree;
      if (m == 0) {
        weight[k] = 1.0;
      } else if (p == 0) {
        // Circular harmonics: undo the SN3D scale of the sectoral terms so each
        // degree contributes 2 cos(m (az - az_i)).
        const double s = legendre_sn3d(m, m, 0.0);
        weight[k] = 2.0 / (s * s);
      } else {
        weight[k] = static_cast<double>(2 * m + 1);
      }
    }
    const double inv_l = 1.0 / static_cast<double>(l_count);
    for (std::size_t i = 0; i < l_count; ++i)
      for (std::size_t k = 0; k < k_count; ++k)
        entries[i * k_count + k] =
            inv_l * weight[k] * y(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(i));
  } else {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(y, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sigma = svd.singularValues();
    const double lambda = 1e-9 * sigma(0);
    Eigen::VectorXd inv(sigma.size());
    for (Eigen::Index j = 0; j < sigma.size(); ++j)
      inv(j) = sigma(j) / (sigma(j) * sigma(j) + lambda * lambda);
    const Eigen::MatrixXd pinv = svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose(); // L x K
    for (std::size_t i = 0; i < l_count; ++i)
      for (std::size_t k = 0; k < k_count; ++k)
        entries[i * k_count + k] = pinv(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k));
  }
  return DecoderMatrix(layout, format, flavour, std::move(entries), std::move(delays));
}

std::vector<double> decode(const AmbisonicFrame& frame, const DecoderMatrix& decoder) {
  const AmbisonicFrame f = to_acn_sn3d(frame);
  check_frame(f);
  if (!(f.format == decoder.format()))
    throw DimensionError("frame format #" + std::to_string(f.format.horizontal_order) + "#" +
                         std::to_string(f.format.periphonic_order) + " does not match the decoder");
  std::vector<double> out(decoder.speakers(), 0.0);
  for (std::size_t i = 0; i < decoder.speakers(); ++i)
    for (std::size_t k = 0; k < decoder.components(); ++k) out[i] += decoder(i, k) * f.components[k];
  return out;
}

std::vector<std::vector<double>> decode(const AmbisonicStream& stream, const DecoderMatrix& decoder) {
  const AmbisonicStream s = to_acn_sn3d(stream);
  if (!(s.format == decoder.format()))
    throw DimensionError("stream has " + std::to_string(s.channels.size()) + " channels (#" +
                         std::to_string(s.format.horizontal_order) + "#" + std::to_string(s.format.periphonic_order) +
                         ") but the decoder expects " + std::to_string(decoder.components()));
  const std::size_t n = s.frames();
  const auto& k = kernels::active();
  std::vector<std::vector<double>> out(decoder.speakers(), std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < decoder.speakers(); ++i) {
    for (std::size_t c = 0; c < decoder.components(); ++c) k.axpy(decoder(i, c), s.channels[c].data(), out[i].data(), n);
    if (decoder.delays()[i] > 0.0) out[i] = delay_signal(out[i], decoder.delays()[i] * s.sample_rate);
  }
  return out;
}

} // namespace spatia
