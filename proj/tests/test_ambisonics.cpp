#include <doctest.h>

#include <cmath>

#include "spatia/ambisonics.hpp"
#include "support.hpp"

using namespace spatia;

namespace {

const double kS = std::sqrt(0.5);

bool frames_close(const AmbisonicFrame& a, const std::vector<double>& b, double tol) {
  if (a.components.size() != b.size()) return false;
  for (std::size_t i = 0; i < b.size(); ++i)
    if (std::abs(a.components[i] - b[i]) > tol) return false;
  return true;
}

// Closed-form real SN3D harmonics up to degree 2 in ACN order.
std::vector<double> closed_form_order2(double az, double el) {
  const double ce = std::cos(el), se = std::sin(el), r3 = std::sqrt(3.0) / 2;
  return {1.0,
          ce * std::sin(az),
          se,
          ce * std::cos(az),
          r3 * ce * ce * std::sin(2 * az),
          r3 * std::sin(2 * el) * std::sin(az),
          (3 * se * se - 1) / 2,
          r3 * std::sin(2 * el) * std::cos(az),
          r3 * ce * ce * std::cos(2 * az)};
}

} // namespace

TEST_CASE("component counts") {
  CHECK(component_count(1, 1) == 4);
  CHECK(component_count(2, 2) == 9);
  CHECK(component_count(3, 1) == 8);
  CHECK(component_count(3, 3) == 16);
  CHECK(component_count(1, 0) == 3);
  CHECK(component_count(0, 0) == 1);
  CHECK_THROWS_AS(component_count(1, 2), ParameterError);
  CHECK_THROWS_AS(component_count(1, -1), ParameterError);
}

TEST_CASE("component indices") {
  const auto full = component_indices(2, 2);
  REQUIRE(full.size() == 9);
  for (std::size_t k = 0; k < full.size(); ++k) CHECK(full[k].acn() == static_cast<int>(k));
  const auto mixed = component_indices(3, 1);
  REQUIRE(mixed.size() == 8);
  CHECK(mixed[4] == SphericalHarmonicIndex{2, 2, 1});
  CHECK(mixed[5] == SphericalHarmonicIndex{2, 2, -1});
  CHECK(mixed[6] == SphericalHarmonicIndex{3, 3, 1});
  CHECK(mixed[7] == SphericalHarmonicIndex{3, 3, -1});
}

TEST_CASE("format validation") {
  CHECK_NOTHROW(AmbisonicFormat::fuma().validate());
  CHECK_THROWS_AS((AmbisonicFormat{ChannelOrdering::FuMa, ChannelNormalization::FuMa, 2, 2}.validate()), ParameterError);
  CHECK_THROWS_AS((AmbisonicFormat{ChannelOrdering::FuMa, ChannelNormalization::SN3D, 1, 1}.validate()), ParameterError);
  CHECK_THROWS_AS(AmbisonicFormat::acn_sn3d(1, 2).validate(), ParameterError);
}

TEST_CASE("Legendre and harmonic values") {
  CHECK(legendre_sn3d(2, 0, 1.0) == doctest::Approx(1.0));
  CHECK(spherical_harmonic({0, 0, 1}, Direction(1.2, -0.3)) == 1.0);
  CHECK(spherical_harmonic({1, 1, 1}, Direction(0, 0)) == doctest::Approx(1.0));
  CHECK(spherical_harmonic({2, 0, 1}, Direction(0, kPi / 2)) == doctest::Approx(1.0));
  CHECK(spherical_harmonic({3, 3, 1}, Direction(0, 0)) == doctest::Approx(std::sqrt(5.0 / 8.0)));
  CHECK_THROWS_AS(spherical_harmonic({1, 0, -1}, Direction(0, 0)), ParameterError);
  CHECK_THROWS_AS(spherical_harmonic({1, 2, 1}, Direction(0, 0)), ParameterError);

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> az(-kPi, kPi), el(-kPi / 2, kPi / 2);
  for (int i = 0; i < 200; ++i) {
    const Direction d(az(rng), el(rng));
    const auto expect = closed_form_order2(d.azimuth(), d.elevation());
    CHECK(frames_close(encode_hoa(1.0, d, 2, 2), expect, 1e-12));
  }
}

TEST_CASE("first-order FuMa encoding") {
  CHECK(frames_close(encode_foa(1.0, Direction(0, 0)), {kS, 1, 0, 0}, 1e-12));
  CHECK(frames_close(encode_foa(1.0, Direction(kPi / 2, 0)), {kS, 0, 1, 0}, 1e-12));
  CHECK(frames_close(encode_foa(0.5, Direction::from_degrees(45, 45)), {0.5 * kS, 0.25, 0.25, 0.5 * kS}, 1e-12));
  CHECK(encode_foa(1.0, Direction(0, 0)).format == AmbisonicFormat::fuma());
}

TEST_CASE("FuMa and ACN conversion") {
  const auto acn = convert_fuma_acn(encode_foa(1.0, Direction(0, 0)));
  CHECK(acn.format == AmbisonicFormat::acn_sn3d(1, 1));
  CHECK(frames_close(acn, {1, 0, 0, 1}, 1e-12));
  const auto d = Direction(0.7, 0.2);
  CHECK(frames_close(to_acn_sn3d(encode_foa(0.8, d)), encode_hoa(0.8, d, 1, 1).components, 1e-15));
  const auto back = convert_fuma_acn(acn);
  CHECK(back.format == AmbisonicFormat::fuma());
  CHECK(frames_close(back, {kS, 1, 0, 0}, 1e-15));
  const AmbisonicFrame zero{AmbisonicFormat::fuma(), {0, 0, 0, 0}};
  CHECK(frames_close(convert_fuma_acn(zero), {0, 0, 0, 0}, 0));
  CHECK_THROWS_AS(convert_fuma_acn(encode_hoa(1, d, 2, 2)), UnsupportedOrderError);
}

TEST_CASE("distance gain") {
  CHECK(distance_gain(2.0, 2.0) == 1.0);
  CHECK(distance_gain(4.0, 2.0) == 0.5);
  CHECK(distance_gain(1.0, 2.0) == 1.0);
  CHECK_THROWS_AS(distance_gain(0.0, 1.0), ParameterError);
  CHECK_THROWS_AS(distance_gain(1.0, -1.0), ParameterError);
  const auto f = encode_with_distance_gain(1.0, Direction(0, 0), 3.0, 1.5, 1, 1);
  CHECK(frames_close(f, {0.5, 0, 0, 0.5}, 1e-15));
}

TEST_CASE("rotations") {
  const auto front = encode_foa(1.0, Direction(0, 0));
  CHECK(frames_close(rotate_z(front, 0.0), front.components, 0));
  CHECK(frames_close(rotate_z(front, kPi / 2), {kS, 0, 1, 0}, 1e-15));
  CHECK(frames_close(rotate_x(front, 0.0), front.components, 0));

  SUBCASE("zenith rotated -90 degrees about y lands at the front") {
    const auto zen = encode_foa(1.0, Direction(0, kPi / 2));
    CHECK(frames_close(rotate_y(zen, -kPi / 2), front.components, 1e-15));
    // Same in ACN ordering.
    const auto zen_acn = encode_hoa(1.0, Direction(0, kPi / 2), 1, 1);
    CHECK(frames_close(rotate_y(zen_acn, -kPi / 2), encode_hoa(1.0, Direction(0, 0), 1, 1).components, 1e-15));
  }
  SUBCASE("inverse rotation restores the frame") {
    const auto f = encode_foa(0.9, Direction(0.4, -0.6));
    CHECK(frames_close(rotate_x(rotate_x(f, 0.77), -0.77), f.components, 1e-12));
    CHECK(frames_close(rotate_y(rotate_y(f, -1.3), 1.3), f.components, 1e-12));
  }
  SUBCASE("rotate_z commutes with encoding in every first-order layout") {
    const Direction d(0.3, 0.5);
    const Direction turned(0.3 + 1.1, 0.5);
    CHECK(frames_close(rotate_z(encode_foa(1, d), 1.1), encode_foa(1, turned).components, 1e-12));
    CHECK(frames_close(rotate_z(encode_hoa(1, d, 1, 1), 1.1), encode_hoa(1, turned, 1, 1).components, 1e-12));
    CHECK(frames_close(rotate_z(encode_hoa(1, d, 1, 0), 1.1), encode_hoa(1, turned, 1, 0).components, 1e-12));
  }
  SUBCASE("unsupported cases") {
    CHECK_THROWS_AS(rotate_z(encode_hoa(1, Direction(0, 0), 2, 2), 0.1), UnsupportedOrderError);
    CHECK_THROWS_AS(rotate_x(encode_hoa(1, Direction(0, 0), 1, 0), 0.1), UnsupportedOrderError);
    CHECK_THROWS_AS(rotate_y(encode_hoa(1, Direction(0, 0), 1, 0), 0.1), UnsupportedOrderError);
    AmbisonicFrame bad{AmbisonicFormat::fuma(), {1, 2, 3}};
    CHECK_THROWS_AS(rotate_z(bad, 0.1), DimensionError);
  }
}

TEST_CASE("stream conversions and rotation") {
  AmbisonicStream s{AmbisonicFormat::fuma(), 48000, {}};
  for (int c = 0; c < 4; ++c) s.channels.push_back(test::noise(100, 10 + c));
  const auto acn = to_acn_sn3d(s);
  CHECK(acn.format == AmbisonicFormat::acn_sn3d(1, 1));
  CHECK(acn.channels[0][5] == doctest::Approx(std::sqrt(2.0) * s.channels[0][5]));
  CHECK(acn.channels[3] == s.channels[1]);
  const auto back = to_fuma(acn);
  for (int c = 0; c < 4; ++c) CHECK(test::max_abs_diff(back.channels[c], s.channels[c]) < 1e-15);

  auto r = s;
  rotate_z(r, 0.6);
  rotate_z(r, -0.6);
  for (int c = 0; c < 4; ++c) CHECK(test::max_abs_diff(r.channels[c], s.channels[c]) < 1e-12);

  auto ragged = s;
  ragged.channels[2].pop_back();
  CHECK_THROWS_AS(ragged.validate(), DimensionError);
  auto short_set = s;
  short_set.channels.pop_back();
  CHECK_THROWS_AS(to_acn_sn3d(short_set), DimensionError);
  auto hoa = AmbisonicStream{AmbisonicFormat::acn_sn3d(2, 2), 48000, std::vector<std::vector<double>>(9, {0.0})};
  CHECK_THROWS_AS(to_fuma(hoa), UnsupportedOrderError);
}

TEST_CASE("decoder speaker-count rule and flavours") {
  CHECK(minimum_speakers(DecoderFlavour::Projection, 1, 1) == 5);
  CHECK(minimum_speakers(DecoderFlavour::Pseudoinverse, 1, 1) == 4);
  CHECK(parse_decoder_flavour("pinv") == DecoderFlavour::Pseudoinverse);
  CHECK_THROWS_AS(parse_decoder_flavour("maxre"), ParameterError);

  const auto tri = layouts::ring(3);
  try {
    (void)build_decoder(tri, 1, 1, DecoderFlavour::Projection);
    FAIL("expected LayoutError");
  } catch (const LayoutError& e) {
    CHECK(std::string(e.what()).find("at least 5 speakers") != std::string::npos);
  }
  CHECK_THROWS_AS(build_decoder(layouts::quad(), 1, 1, DecoderFlavour::Projection), LayoutError);
  CHECK_NOTHROW(build_decoder(layouts::quad(), 1, 1, DecoderFlavour::Pseudoinverse));
  CHECK_NOTHROW(build_decoder(layouts::quad(), 1, 0, DecoderFlavour::Projection));
}

TEST_CASE("square decoder, first-order horizontal") {
  const auto sq = layouts::quad();
  const auto dec = build_decoder(sq, 1, 0, DecoderFlavour::Projection);
  CHECK(dec.speakers() == 4);
  CHECK(dec.components() == 3);

  SUBCASE("source at speaker 1 peaks there") {
    const auto out = decode(encode_hoa(1, sq.direction(1), 1, 0), dec);
    CHECK(std::max_element(out.begin(), out.end()) - out.begin() == 1);
  }
  SUBCASE("bisector gives equal feeds") {
    const auto out = decode(encode_hoa(1, Direction(deg_to_rad(180.0)), 1, 0), dec);
    CHECK(std::abs(out[1] - out[2]) < 1e-9);
  }
  SUBCASE("W-only frame drives all speakers equally") {
    const auto out = decode(AmbisonicFrame{AmbisonicFormat::acn_sn3d(1, 0), {1, 0, 0}}, dec);
    for (double v : out) CHECK(v == doctest::Approx(out[0]));
  }
  SUBCASE("zero frame") {
    const auto out = decode(AmbisonicFrame{AmbisonicFormat::acn_sn3d(1, 0), {0, 0, 0}}, dec);
    for (double v : out) CHECK(v == 0.0);
  }
  SUBCASE("format mismatch") {
    CHECK_THROWS_AS(decode(encode_hoa(1, Direction(0, 0), 1, 1), dec), DimensionError);
  }
}

TEST_CASE("regular ring projection decoding reproduces the sampling decoder") {
  // For a regular ring each speaker feed is (1 + 2 sum_m cos(m (az - az_i))) / L.
  const auto hex = layouts::preset("hexagon");
  const auto dec = build_decoder(hex, 2, 0, DecoderFlavour::Projection);
  for (int deg = 0; deg < 360; deg += 7) {
    const double az = deg_to_rad(deg);
    const auto out = decode(encode_hoa(1, Direction(az), 2, 0), dec);
    double energy = 0;
    for (std::size_t i = 0; i < hex.size(); ++i) {
      const double delta = az - hex.direction(i).azimuth();
      const double expect = (1 + 2 * std::cos(delta) + 2 * std::cos(2 * delta)) / 6.0;
      CHECK(out[i] == doctest::Approx(expect).epsilon(1e-12));
      energy += out[i] * out[i];
    }
    CHECK(energy == doctest::Approx(5.0 / 6.0).epsilon(1e-9));
  }
}

TEST_CASE("pseudoinverse decoder inverts the speaker matrix") {
  const auto cube = layouts::cube();
  const auto dec = build_decoder(cube, 1, 1, DecoderFlavour::Pseudoinverse);
  // Re-encoding the speaker feeds must give back the original components.
  const auto f = encode_hoa(1.0, Direction(0.4, 0.3), 1, 1);
  const auto feeds = decode(f, dec);
  std::vector<double> re(4, 0.0);
  for (std::size_t i = 0; i < cube.size(); ++i) {
    const auto y = encoding_coefficients(cube.direction(i), AmbisonicFormat::acn_sn3d(1, 1));
    for (std::size_t k = 0; k < 4; ++k) re[k] += y[k] * feeds[i];
  }
  CHECK(test::max_abs_diff(re, f.components) < 1e-7);
}

TEST_CASE("non-equidistant layouts need delay compensation") {
  auto l = layouts::ring(6);
  l.speakers[2] = 2.0 * l.speakers[2];
  CHECK_THROWS_AS(build_decoder(l, 1, 0, DecoderFlavour::Projection), LayoutError);
  const auto dec = build_decoder(l, 1, 0, DecoderFlavour::Projection, true);
  for (std::size_t i = 0; i < 6; ++i) CHECK(dec.delays()[i] == doctest::Approx(i == 2 ? 0.0 : 1.0 / kSpeedOfSound));

  // Stream decoding applies the delay: speaker 0 lags speaker 2 by 48000/343 samples.
  AmbisonicStream s{AmbisonicFormat::acn_sn3d(1, 0), 48000, std::vector<std::vector<double>>(3, std::vector<double>(400, 0.0))};
  s.channels[0][0] = 1.0;
  const auto out = decode(s, dec);
  const double lag = 48000.0 / kSpeedOfSound;
  const auto whole = static_cast<std::size_t>(lag);
  const double frac = lag - static_cast<double>(whole);
  CHECK(out[2][0] == doctest::Approx(dec(2, 0)));
  CHECK(out[0][0] == 0.0);
  CHECK(out[0][whole] == doctest::Approx((1 - frac) * dec(0, 0)));
  CHECK(out[0][whole + 1] == doctest::Approx(frac * dec(0, 0)));
}

TEST_CASE("decoder matrix construction checks") {
  const auto l = layouts::quad();
  CHECK_THROWS_AS(DecoderMatrix(l, AmbisonicFormat::acn_sn3d(1, 0), DecoderFlavour::Projection, {1, 2, 3}, {}),
                  DimensionError);
  CHECK_THROWS_AS(DecoderMatrix(l, AmbisonicFormat::fuma(), DecoderFlavour::Projection,
                                std::vector<double>(16, 0.0), {}),
                  ParameterError);
}
