#include <doctest.h>

#include <cmath>

#include "spatia/binaural.hpp"
#include "spatia/convolution.hpp"
#include "spatia/hrir.hpp"
#include "spatia/widener.hpp"
#include "support.hpp"

using namespace spatia;

namespace {

std::vector<double> naive_convolution(const std::vector<double>& x, const std::vector<double>& h) {
  std::vector<double> y(x.size() + h.size() - 1, 0.0);
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t k = 0; k < h.size(); ++k) y[i + k] += x[i] * h[k];
  return y;
}

Hrir impulse_hrir(const Direction& d, std::size_t taps = 4) {
  Hrir h{d, std::vector<double>(taps, 0.0), std::vector<double>(taps, 0.0), std::nullopt};
  h.left[0] = h.right[0] = 1.0;
  return h;
}

Hrir random_hrir(const Direction& d, std::uint64_t seed, std::size_t taps = 32) {
  return {d, test::noise(taps, seed), test::noise(taps, seed + 1000), std::nullopt};
}

AmbisonicStream noise_stream(const AmbisonicFormat& f, std::size_t frames, std::uint64_t seed) {
  AmbisonicStream s{f, 48000, {}};
  for (std::size_t k = 0; k < f.component_count(); ++k) s.channels.push_back(test::noise(frames, seed + k));
  return s;
}

std::vector<Direction> tetrahedron() {
  return {Direction::from_vector({1, 1, 1}), Direction::from_vector({-1, -1, 1}), Direction::from_vector({-1, 1, -1}),
          Direction::from_vector({1, -1, -1})};
}

} // namespace

TEST_CASE("block convolver") {
  SUBCASE("unit impulse is the identity") {
    BlockConvolver c({1.0});
    const auto x = test::noise(50, 1);
    std::vector<double> y(50);
    c.process(x, y);
    CHECK(y == x);
  }
  SUBCASE("delayed impulse delays the input") {
    BlockConvolver c({0, 0, 0, 1});
    const auto x = test::noise(20, 2);
    std::vector<double> y(20);
    c.process(x, y);
    for (std::size_t n = 0; n < 20; ++n) CHECK(y[n] == (n < 3 ? 0.0 : x[n - 3]));
    const auto tail = c.flush();
    REQUIRE(tail.size() == 3);
    CHECK(tail[2] == x[19]);
  }
  SUBCASE("uneven blocks match a direct convolution") {
    const auto h = test::noise(256, 3);
    const auto x = test::noise(3 * 300 + 17, 4);
    const auto expect = naive_convolution(x, h);
    BlockConvolver c(h);
    std::vector<double> y(x.size());
    std::size_t pos = 0;
    for (std::size_t len : {300u, 1u, 299u, 317u}) {
      c.process(std::span<const double>(x.data() + pos, len), std::span<double>(y.data() + pos, len));
      pos += len;
    }
    REQUIRE(pos == x.size());
    auto tail = c.flush();
    y.insert(y.end(), tail.begin(), tail.end());
    CHECK(test::max_abs_diff(y, expect) < 1e-12);
    CHECK(convolve(x, h) == y);
  }
  SUBCASE("in-place processing and process_add") {
    const auto h = test::noise(8, 5);
    auto x = test::noise(64, 6);
    const auto orig = x;
    BlockConvolver a(h), b(h);
    a.process(x, x);
    std::vector<double> acc(64, 1.0);
    b.process_add(orig, acc);
    for (std::size_t n = 0; n < 64; ++n) CHECK(acc[n] == doctest::Approx(x[n] + 1.0));
    a.reset();
    std::vector<double> again(64);
    a.process(orig, again);
    CHECK(again == x);
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(BlockConvolver({}), ParameterError);
    CHECK_THROWS_AS(BlockConvolver({1.0, NAN}), ParameterError);
    BlockConvolver c({1.0});
    std::vector<double> in(4), out(3);
    CHECK_THROWS_AS(c.process(in, out), DimensionError);
  }
}

TEST_CASE("HRIR sets") {
  SUBCASE("entry validation") {
    Hrir bad{Direction(0, 0), {1, 0}, {1}, std::nullopt};
    CHECK_THROWS_AS(bad.validate(), ParameterError);
    Hrir near = impulse_hrir(Direction(0, 0));
    near.near_field_distance = 0.0;
    CHECK_THROWS_AS(near.validate(), ParameterError);
    CHECK_THROWS_AS(HrirSet({}), ParameterError);
    CHECK_THROWS_AS(HrirSet({impulse_hrir(Direction(0.1, 0)), impulse_hrir(Direction(0.1, 0))}), ParameterError);
  }
  SUBCASE("symmetric sets need channel-swapped mirrors") {
    CHECK_THROWS_AS(HrirSet({random_hrir(Direction(0.5, 0), 1)}, true), ParameterError);
    auto a = random_hrir(Direction(0.5, 0), 1);
    Hrir b{Direction(-0.5, 0), a.right, a.left, std::nullopt};
    CHECK_NOTHROW(HrirSet({a, b}, true));
    b.left[3] += 1e-6;
    CHECK_THROWS_AS(HrirSet({a, b}, true), ParameterError);
  }
  SUBCASE("nearest lookup") {
    const auto set = synthesize_spherical_head_set(15, 15, 48000, 16);
    CHECK(set.symmetric_head());
    CHECK(set.size() == 24 * 11 + 2);
    const auto& exact = nearest_hrir(set, Direction::from_degrees(45, 30));
    CHECK(angular_distance(exact.direction, Direction::from_degrees(45, 30)) < 1e-12);
    const auto& off = nearest_hrir(set, Direction::from_degrees(46, 29));
    CHECK(angular_distance(off.direction, Direction::from_degrees(45, 30)) < 1e-12);
    const auto& tie = nearest_hrir(set, Direction::from_degrees(7.5, 0));
    CHECK(tie.direction.azimuth() == doctest::Approx(0.0));
    const auto& pole = nearest_hrir(set, Direction::from_degrees(123, 89));
    CHECK(pole.direction.elevation() == doctest::Approx(kPi / 2));
  }
  SUBCASE("grid parameter errors") {
    CHECK_THROWS_AS(synthesize_spherical_head_set(7, 0, 48000), ParameterError);
    CHECK_THROWS_AS(synthesize_spherical_head_set(10, 20, 48000), ParameterError);
    CHECK_THROWS_AS(synthesize_spherical_head_set(0, 0, 48000), ParameterError);
  }
}

TEST_CASE("spherical-head synthesis") {
  const double fs = 48000;
  CHECK(woodworth_itd(Direction::from_degrees(90)) * 1e3 == doctest::Approx(0.656).epsilon(2e-3));
  CHECK(woodworth_itd(Direction::from_degrees(0)) == 0.0);
  CHECK(woodworth_itd(Direction::from_degrees(180)) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK_THROWS_AS(woodworth_itd(Direction(0, 0), 0.0), ParameterError);

  const auto front = synthesize_spherical_head_hrir(Direction(0, 0), fs, 64);
  CHECK(front.left == front.right);
  CHECK(front.left[2] == 1.0);

  const auto left = synthesize_spherical_head_hrir(Direction::from_degrees(40, 10), fs, 64);
  const auto right = synthesize_spherical_head_hrir(Direction::from_degrees(-40, 10), fs, 64);
  CHECK(left.left == right.right);
  CHECK(left.right == right.left);
  // The near (left) ear leads.
  CHECK(left.left[2] == 1.0);
  CHECK(left.right[2] == 0.0);

  CHECK_THROWS_AS(synthesize_spherical_head_hrir(Direction(0, 0), fs, 0), ParameterError);
  CHECK_THROWS_AS(synthesize_spherical_head_hrir(Direction(0, 0), 0.0), ParameterError);
}

TEST_CASE("HRIR set files round trip") {
  test::TempDir dir;
  const auto set = synthesize_spherical_head_set(30, 0, 44100, 24);
  save_hrir_set(set, 44100, dir / "hrir.json");
  double rate = 0;
  const auto back = load_hrir_set(dir / "hrir.json", &rate);
  CHECK(rate == 44100);
  CHECK(back.symmetric_head());
  REQUIRE(back.size() == set.size());
  for (std::size_t i = 0; i < set.size(); ++i) {
    CHECK(angular_distance(back.entries()[i].direction, set.entries()[i].direction) < 1e-9);
    CHECK(back.entries()[i].left == set.entries()[i].left);
    CHECK(back.entries()[i].right == set.entries()[i].right);
  }
  CHECK_THROWS_AS(load_hrir_set(dir / "missing.json"), IoError);
}

TEST_CASE("virtual loudspeaker decoding") {
  const auto oct = layouts::preset("octagon");
  const auto fmt = AmbisonicFormat::acn_sn3d(1, 0);
  const auto dec = build_decoder(oct, 1, 0, DecoderFlavour::Projection);
  const auto stream = noise_stream(fmt, 500, 40);

  SUBCASE("unit-impulse HRIRs sum the speaker feeds") {
    std::vector<Hrir> h;
    for (std::size_t i = 0; i < oct.size(); ++i) h.push_back(impulse_hrir(oct.direction(i)));
    const auto ears = binaural_decode_virtual_speakers(stream, dec, h, 64);
    const auto feeds = decode(stream, dec);
    std::vector<double> sum(500, 0.0);
    for (const auto& f : feeds)
      for (std::size_t n = 0; n < 500; ++n) sum[n] += f[n];
    CHECK(test::max_abs_diff(ears.left, sum) < 1e-12);
    CHECK(test::max_abs_diff(ears.right, sum) < 1e-12);

    const auto f = precompute_filter_matrix(dec, h);
    for (std::size_t k = 0; k < 3; ++k) {
      double row = 0;
      for (std::size_t i = 0; i < oct.size(); ++i) row += dec(i, k);
      CHECK(f.left[k][0] == doctest::Approx(row));
      for (std::size_t t = 1; t < f.taps(); ++t) CHECK(f.left[k][t] == 0.0);
    }
  }
  SUBCASE("source at a virtual speaker is dominated by that speaker") {
    std::vector<Hrir> h;
    for (std::size_t i = 0; i < oct.size(); ++i) h.push_back(synthesize_spherical_head_hrir(oct.direction(i), 48000, 32));
    AmbisonicStream s{fmt, 48000, std::vector<std::vector<double>>(3, std::vector<double>(64, 0.0))};
    const auto c = encoding_coefficients(oct.direction(2), fmt);
    for (std::size_t k = 0; k < 3; ++k) s.channels[k][0] = c[k];
    const auto feeds = decode(s, dec);
    std::size_t loudest = 0;
    for (std::size_t i = 0; i < feeds.size(); ++i)
      if (std::abs(feeds[i][0]) > std::abs(feeds[loudest][0])) loudest = i;
    CHECK(loudest == 2);
  }
  SUBCASE("precomputed filters match the virtual speaker path") {
    std::vector<Hrir> h;
    for (std::size_t i = 0; i < oct.size(); ++i) h.push_back(random_hrir(oct.direction(i), 70 + i, 40));
    const auto f = precompute_filter_matrix(dec, h);
    CHECK(f.components() == 3);
    CHECK(f.derivation == FilterDerivation::VirtualSpeakers);
    const auto a = binaural_decode_virtual_speakers(stream, dec, h, 100);
    const auto b = apply_filter_matrix(stream, f, 37);
    CHECK(test::max_abs_diff(a.left, b.left) < 1e-12);
    CHECK(test::max_abs_diff(a.right, b.right) < 1e-12);
  }
  SUBCASE("zero decoder gives zero filters") {
    const DecoderMatrix zero(oct, fmt, DecoderFlavour::Projection, std::vector<double>(24, 0.0), {});
    std::vector<Hrir> h;
    for (std::size_t i = 0; i < oct.size(); ++i) h.push_back(random_hrir(oct.direction(i), i, 8));
    for (const auto& row : precompute_filter_matrix(zero, h).left)
      for (double v : row) CHECK(v == 0.0);
  }
  SUBCASE("dimension errors") {
    std::vector<Hrir> h(3, impulse_hrir(Direction(0, 0)));
    CHECK_THROWS_AS(binaural_decode_virtual_speakers(stream, dec, h), DimensionError);
    CHECK_THROWS_AS(precompute_filter_matrix(dec, h), DimensionError);
    CHECK_THROWS_AS(binauralize_speaker_feeds({{1.0}}, h), DimensionError);
    std::vector<Hrir> ok(8, impulse_hrir(Direction(0, 0)));
    CHECK_THROWS_AS(binaural_decode_virtual_speakers(stream, dec, ok, 0), ParameterError);
    const auto f = precompute_filter_matrix(dec, ok);
    CHECK_THROWS_AS(apply_filter_matrix(noise_stream(AmbisonicFormat::acn_sn3d(1, 1), 10, 1), f), DimensionError);
  }
}

TEST_CASE("least-squares filter design") {
  const auto fmt = AmbisonicFormat::acn_sn3d(1, 1);
  SUBCASE("four tetrahedral directions are reproduced exactly") {
    const auto dirs = tetrahedron();
    std::vector<Hrir> h;
    for (std::size_t j = 0; j < 4; ++j) h.push_back(random_hrir(dirs[j], 10 * j, 24));
    const auto f = solve_filter_least_squares(dirs, h);
    CHECK(f.derivation == FilterDerivation::LeastSquares);
    for (std::size_t j = 0; j < 4; ++j) {
      const auto c = encoding_coefficients(dirs[j], fmt);
      for (std::size_t t = 0; t < 24; ++t) {
        double l = 0, r = 0;
        for (std::size_t k = 0; k < 4; ++k) l += f.left[k][t] * c[k], r += f.right[k][t] * c[k];
        CHECK(std::abs(l - h[j].left[t]) < 1e-9);
        CHECK(std::abs(r - h[j].right[t]) < 1e-9);
      }
    }
  }
  SUBCASE("horizontal cross is rank deficient for 3-D B-format") {
    std::vector<Direction> dirs{Direction::from_degrees(90), Direction::from_degrees(-90), Direction::from_degrees(0),
                                Direction::from_degrees(180)};
    std::vector<Hrir> h;
    for (const auto& d : dirs) h.push_back(random_hrir(d, 1, 8));
    CHECK_THROWS_AS(solve_filter_least_squares(dirs, h), ConditioningError);
  }
  SUBCASE("symmetric head mirrors the left filters") {
    const auto dirs = tetrahedron();
    std::vector<Hrir> h;
    for (std::size_t j = 0; j < 4; ++j) h.push_back(random_hrir(dirs[j], 3 * j, 12));
    const auto f = solve_filter_least_squares(dirs, h, true);
    for (std::size_t k = 0; k < 4; ++k)
      for (std::size_t t = 0; t < 12; ++t) CHECK(f.right[k][t] == (k == 1 ? -f.left[k][t] : f.left[k][t]));
  }
  SUBCASE("argument errors") {
    const auto dirs = tetrahedron();
    std::vector<Hrir> h{random_hrir(dirs[0], 1, 4), random_hrir(dirs[1], 2, 4), random_hrir(dirs[2], 3, 4)};
    CHECK_THROWS_AS(solve_filter_least_squares(std::span(dirs).first(3), h), ParameterError);
    CHECK_THROWS_AS(solve_filter_least_squares(dirs, h), DimensionError);
  }
}

TEST_CASE("head rotation compensation") {
  const auto fmt = AmbisonicFormat::acn_sn3d(1, 1);
  auto encoded = [&](double az_deg) {
    AmbisonicStream s{fmt, 48000, {}};
    for (double c : encoding_coefficients(Direction::from_degrees(az_deg, 10), fmt)) s.channels.push_back({c, 0.5 * c});
    return s;
  };
  auto s = encoded(30);
  compensate_head_rotation(s, 0.0);
  CHECK(s.channels == encoded(30).channels);
  compensate_head_rotation(s, deg_to_rad(30));
  const auto expect = encoded(0);
  for (std::size_t k = 0; k < 4; ++k) CHECK(test::max_abs_diff(s.channels[k], expect.channels[k]) < 1e-12);
}

TEST_CASE("stereo widener") {
  const double fs = 48000;
  const StereoSignal in{test::noise(2000, 1), test::noise(2000, 2)};
  SUBCASE("identity is bit-exact") {
    const auto out = stereo_widen(in, WidenerParams::identity(), fs);
    CHECK(out.left == in.left);
    CHECK(out.right == in.right);
  }
  SUBCASE("mono input is untouched by the side stage") {
    WidenerParams p = WidenerParams::identity();
    p.side_gain = 3.0;
    const StereoSignal mono{in.left, in.left};
    const auto out = stereo_widen(mono, p, fs);
    CHECK(out.left == mono.left);
    CHECK(out.right == mono.right);
  }
  SUBCASE("anti-phase input doubles with side gain 2") {
    WidenerParams p = WidenerParams::identity();
    p.side_gain = 2.0;
    StereoSignal anti{in.left, in.left};
    for (double& v : anti.right) v = -v;
    const auto out = stereo_widen(anti, p, fs);
    for (std::size_t n = 0; n < 2000; ++n) {
      CHECK(std::abs(out.left[n] - 2 * anti.left[n]) < 1e-12);
      CHECK(std::abs(out.right[n] - 2 * anti.right[n]) < 1e-12);
    }
  }
  SUBCASE("crossfeed leaks a low-passed copy into the other ear") {
    WidenerParams p = WidenerParams::identity();
    p.crossfeed_gain = 0.5;
    StereoSignal one{std::vector<double>(4000, 1.0), std::vector<double>(4000, 0.0)};
    const auto out = stereo_widen(one, p, fs);
    CHECK(out.left == one.left);
    CHECK(out.right[0] > 0.0);
    CHECK(out.right[0] < 0.1);
    CHECK(out.right.back() == doctest::Approx(0.5));
  }
  SUBCASE("reflection arrives after the delay") {
    WidenerParams p = WidenerParams::identity();
    p.reflection_gain = 0.5;
    p.reflection_delay_s = 0.001;
    StereoSignal imp{std::vector<double>(200, 0.0), std::vector<double>(200, 0.0)};
    imp.left[0] = 1.0;
    const auto out = stereo_widen(imp, p, fs);
    for (std::size_t n = 1; n < 48; ++n) CHECK(out.left[n] == 0.0);
    CHECK(out.left[48] > 0.0);
    for (double v : out.right) CHECK(v == 0.0);
  }
  SUBCASE("default parameters widen a panned source") {
    const StereoSignal panned{in.left, std::vector<double>(2000, 0.0)};
    const auto out = stereo_widen(panned, WidenerParams{}, fs);
    CHECK(out.left.size() == 2000);
    CHECK(test::sum_sq(out.left) > test::sum_sq(panned.left));
  }
  SUBCASE("parameter errors") {
    WidenerParams p;
    p.side_gain = -1;
    CHECK_THROWS_AS(stereo_widen(in, p, fs), ParameterError);
    p = WidenerParams{};
    p.crossfeed_gain = 1.5;
    CHECK_THROWS_AS(stereo_widen(in, p, fs), ParameterError);
    p = WidenerParams{};
    p.reflection_gain = 1.0;
    CHECK_THROWS_AS(stereo_widen(in, p, fs), ParameterError);
    p = WidenerParams{};
    p.crossfeed_cutoff_hz = 0;
    CHECK_THROWS_AS(stereo_widen(in, p, fs), ParameterError);
    CHECK_THROWS_AS(stereo_widen(StereoSignal{{1, 2}, {1}}, WidenerParams{}, fs), DimensionError);
  }
}
