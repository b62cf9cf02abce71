#include <doctest.h>

#include <cmath>

#include "spatia/vbap.hpp"
#include "support.hpp"

using namespace spatia;

namespace {

LoudspeakerLayout dome() {
  LoudspeakerLayout l;
  l.name = "dome";
  for (double az : {0.0, 90.0, 180.0, -90.0}) l.speakers.push_back(spherical_to_position(Direction::from_degrees(az, 30), 1));
  l.speakers.push_back({0, 0, 1});
  return l;
}

std::size_t index_of(const LoudspeakerLayout& l, Vec3 unit) {
  for (std::size_t i = 0; i < l.size(); ++i)
    if (distance(normalized(l.speakers[i]), normalized(unit)) < 1e-12) return i;
  FAIL("speaker not found");
  return 0;
}

} // namespace

TEST_CASE("base construction") {
  CHECK(build_bases(layouts::stereo(), 2).bases.size() == 1);
  CHECK(build_bases(layouts::preset("octagon"), 2).bases.size() == 8);
  const auto cube = build_bases(layouts::cube(), 3);
  CHECK(cube.bases.size() == 12);
  CHECK(cube.dimensionality == 3);
  for (const auto& b : cube.bases) CHECK(b.size() == 3);

  auto uneven = layouts::quad();
  uneven.speakers[0] = 1.5 * uneven.speakers[0];
  CHECK_THROWS_AS(build_bases(uneven, 2), LayoutError);
  CHECK_THROWS_AS(build_bases(layouts::quad(), 3), LayoutError);
  CHECK_THROWS_AS(build_bases(layouts::quad(), 4), ParameterError);

  // Antipodal pair: no usable base.
  LoudspeakerLayout opposite;
  opposite.speakers = {{1, 0, 0}, {-1, 0, 0}};
  CHECK_THROWS_AS(build_bases(opposite, 2), LayoutError);
}

TEST_CASE("singular bases are rejected") {
  CHECK_THROWS_AS(VectorBase({0, 1}, {{1, 0, 0}, {-1, 0, 0}}, 2), DegenerateGeometryError);
  CHECK_THROWS_AS(VectorBase({0, 1, 2}, {{1, 0, 0}, {0, 1, 0}, {std::sqrt(0.5), std::sqrt(0.5), 0}}, 3),
                  DegenerateGeometryError);
  CHECK_THROWS_AS(VectorBase({0, 1}, {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}, 2), DimensionError);
}

TEST_CASE("raw gains") {
  const VectorBase pair({0, 1}, {{1, 0, 0}, {0, 1, 0}}, 2);
  auto g = solve_gains(pair, {1, 0, 0});
  CHECK(g[0] == doctest::Approx(1.0));
  CHECK(std::abs(g[1]) < 1e-15);
  g = solve_gains(pair, {std::sqrt(0.5), std::sqrt(0.5), 0});
  CHECK(g[0] == doctest::Approx(g[1]));
  g = solve_gains(pair, {0, -1, 0});
  CHECK(g[1] < 0.0);
}

TEST_CASE("base selection tie-break") {
  const std::vector<std::vector<double>> c{{0.2, 0.3, 0.3}, {0.1, 0.9, 0.9}};
  CHECK(pick_base(c) == 0u);
  const std::vector<std::vector<double>> swapped{{0.1, 0.9, 0.9}, {0.2, 0.3, 0.3}};
  CHECK(pick_base(swapped) == 1u);
  const std::vector<std::vector<double>> tie{{0.0, 1.0}, {1.0, 0.0}};
  CHECK(pick_base(tie) == 0u);
  const std::vector<std::vector<double>> negative{{-0.1, 1.0}, {-1e-10, 0.5}};
  CHECK(pick_base(negative) == 1u);
  const std::vector<std::vector<double>> none{{-0.1, 1.0}};
  CHECK_FALSE(pick_base(none).has_value());
}

TEST_CASE("normalization") {
  const std::vector<double> a{1, 0}, b{1, 1}, c{0.2, 0.3, 0.3}, z{0, 0};
  CHECK(normalize_gains(a) == std::vector<double>{1, 0});
  const auto nb = normalize_gains(b);
  CHECK(nb[0] == doctest::Approx(std::sqrt(0.5)));
  CHECK(nb[1] == doctest::Approx(std::sqrt(0.5)));
  const auto nc = normalize_gains(c, 2.0);
  CHECK(test::sum_sq(nc) == doctest::Approx(2.0));
  CHECK(nc[1] / nc[0] == doctest::Approx(1.5));
  CHECK_THROWS_AS(normalize_gains(z), NormalizationError);
  CHECK_THROWS_AS(normalize_gains(a, 0.0), ParameterError);
}

TEST_CASE("2-D panning on an octagon") {
  const auto oct = layouts::preset("octagon");
  const auto bases = build_bases(oct, 2);
  SUBCASE("target at a speaker") {
    const auto g = vbap_pan(bases, oct.direction(3));
    for (std::size_t i = 0; i < 8; ++i) CHECK(g.gains[i] == doctest::Approx(i == 3 ? 1.0 : 0.0));
  }
  SUBCASE("midway between two speakers") {
    const auto g = vbap_pan(bases, Direction::from_degrees(22.5));
    CHECK(g.gains[0] == doctest::Approx(g.gains[1]));
    CHECK(g.power() == doctest::Approx(1.0));
  }
  SUBCASE("power level C") {
    CHECK(vbap_pan(bases, Direction::from_degrees(10), 3.0).power() == doctest::Approx(3.0));
  }
  SUBCASE("elevation is ignored in 2-D") {
    const auto flat = vbap_pan(bases, Direction::from_degrees(10));
    const auto up = vbap_pan(bases, Direction::from_degrees(10, 40));
    CHECK(test::max_abs_diff(flat.gains, up.gains) < 1e-15);
  }
  SUBCASE("gains are continuous across a base boundary") {
    const double step = 1e-6;
    auto prev = vbap_pan(bases, Direction(deg_to_rad(45.0) - 2000 * step)).gains;
    for (int k = -1999; k <= 2000; ++k) {
      const auto cur = vbap_pan(bases, Direction(deg_to_rad(45.0) + k * step)).gains;
      // The slope of a 45-degree pair never exceeds 1/sin(45 deg).
      CHECK(test::max_abs_diff(prev, cur) <= 1.5 * step);
      prev = cur;
    }
  }
}

TEST_CASE("2-D layout with a wide gap leaves directions uncovered") {
  LoudspeakerLayout front;
  for (double az : {-60.0, 0.0, 60.0}) front.speakers.push_back(spherical_to_position(Direction::from_degrees(az), 1));
  const auto bases = build_bases(front, 2);
  CHECK(bases.bases.size() == 2);
  CHECK_NOTHROW(vbap_pan(bases, Direction::from_degrees(30)));
  CHECK_THROWS_AS(vbap_pan(bases, Direction::from_degrees(180)), CoverageError);
}

TEST_CASE("3-D panning") {
  const auto cube = layouts::cube();
  const auto bases = build_bases(cube, 3);
  SUBCASE("target on a cube edge silences the third speaker") {
    const auto g = vbap_pan(bases, Direction::from_vector({1, 0, 1}));
    const auto a = index_of(cube, {1, 1, 1});
    const auto b = index_of(cube, {1, -1, 1});
    CHECK(g.gains[a] == doctest::Approx(g.gains[b]));
    for (std::size_t i = 0; i < cube.size(); ++i)
      if (i != a && i != b) CHECK(std::abs(g.gains[i]) < 1e-12);
  }
  SUBCASE("panning reconstructs the target direction") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> az(-kPi, kPi), el(-1.5, 1.5);
    for (int i = 0; i < 300; ++i) {
      const Direction d(az(rng), el(rng));
      const auto g = vbap_pan(bases, d);
      Vec3 sum{};
      for (std::size_t k = 0; k < cube.size(); ++k) {
        CHECK(g.gains[k] >= 0.0);
        sum = sum + g.gains[k] * normalized(cube.speakers[k]);
      }
      CHECK(distance(normalized(sum), direction_to_unit_vector(d)) < 1e-9);
      CHECK(g.power() == doctest::Approx(1.0));
    }
  }
  SUBCASE("partial dome has a coverage gap below the horizon") {
    const auto d = dome();
    const auto db = build_bases(d, 3);
    CHECK_NOTHROW(vbap_pan(db, Direction::from_degrees(20, 60)));
    CHECK_THROWS_AS(vbap_pan(db, Direction::from_degrees(0, -45)), CoverageError);
  }
}
