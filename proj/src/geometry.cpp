#include "spatia/geometry.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <set>

namespace spatia {

double wrap_angle(double radians) noexcept {
  double r = std::remainder(radians, 2.0 * kPi);
  if (r <= -kPi) r += 2.0 * kPi;
  if (r > kPi) r -= 2.0 * kPi;
  return r;
}

Vec3 normalized(Vec3 a) {
  const double n = norm(a);
  if (!(n > 0.0) || !std::isfinite(n))
    throw DegenerateGeometryError("cannot normalize a zero or non-finite vector");
  return (1.0 / n) * a;
}

Direction::Direction(double azimuth, double elevation) {
  if (!std::isfinite(azimuth) || !std::isfinite(elevation))
    throw ParameterError("direction angles must be finite");
  constexpr double half_pi = kPi / 2.0;
  if (std::abs(elevation) > half_pi + 1e-12)
    throw ParameterError("elevation must lie in [-pi/2, pi/2]");
  elevation_ = std::clamp(elevation, -half_pi, half_pi);
  azimuth_ = wrap_angle(azimuth);
}

Direction Direction::from_vector(Vec3 v) {
  const double horizontal = std::hypot(v.x, v.y);
  if (!(horizontal > 0.0) && v.z == 0.0)
    throw DegenerateGeometryError("direction of the zero vector is undefined");
  const double el = std::atan2(v.z, horizontal);
  const double az = horizontal > 0.0 ? std::atan2(v.y, v.x) : 0.0;
  return {az, el};
}

Vec3 direction_to_unit_vector(const Direction& d) noexcept {
  const double ce = std::cos(d.elevation());
  return {ce * std::cos(d.azimuth()), ce * std::sin(d.azimuth()), std::sin(d.elevation())};
}

double angular_distance(const Direction& a, const Direction& b) noexcept {
  const Vec3 u = direction_to_unit_vector(a);
  const Vec3 v = direction_to_unit_vector(b);
  // atan2 form stays accurate for nearly parallel and antiparallel vectors.
  return std::atan2(norm(cross(u, v)), dot(u, v));
}

Position spherical_to_position(const Direction& d, double distance_m) noexcept {
  return distance_m * direction_to_unit_vector(d);
}

std::string_view to_string(LayoutCategory c) noexcept {
  switch (c) {
  case LayoutCategory::Regular: return "regular";
  case LayoutCategory::DiametricPairs: return "diametric-pairs";
  case LayoutCategory::Irregular: return "irregular";
  }
  return "irregular";
}

LayoutCategory parse_layout_category(std::string_view s) {
  if (s == "regular") return LayoutCategory::Regular;
  if (s == "diametric-pairs") return LayoutCategory::DiametricPairs;
  if (s == "irregular") return LayoutCategory::Irregular;
  throw FormatError("unknown layout category '" + std::string(s) + "'");
}

std::vector<Direction> LoudspeakerLayout::directions() const {
  std::vector<Direction> out;
  out.reserve(speakers.size());
  for (const auto& s : speakers) out.push_back(Direction::from_vector(s));
  return out;
}

std::vector<double> LoudspeakerLayout::distances() const {
  std::vector<double> out;
  out.reserve(speakers.size());
  for (const auto& s : speakers) out.push_back(norm(s));
  return out;
}

bool LoudspeakerLayout::is_horizontal(double tol) const {
  return std::all_of(speakers.begin(), speakers.end(), [&](const Position& p) {
    return std::abs(Direction::from_vector(p).elevation()) <= tol;
  });
}

bool LoudspeakerLayout::is_equidistant(double rel_tol) const {
  const auto d = distances();
  if (d.empty()) return true;
  const auto [lo, hi] = std::minmax_element(d.begin(), d.end());
  return (*hi - *lo) <= rel_tol * *hi;
}

namespace layouts {

LoudspeakerLayout stereo(double half_angle, double radius) {
  LoudspeakerLayout l{"stereo", LayoutCategory::Irregular, {}};
  l.speakers.push_back(spherical_to_position(Direction(half_angle, 0.0), radius));
  l.speakers.push_back(spherical_to_position(Direction(-half_angle, 0.0), radius));
  return l;
}

LoudspeakerLayout ring(std::size_t n, double radius, double first_azimuth, std::string name) {
  if (n == 0) throw ParameterError("ring needs at least one speaker");
  if (name.empty()) name = "ring" + std::to_string(n);
  LoudspeakerLayout l{std::move(name), LayoutCategory::Regular, {}};
  for (std::size_t k = 0; k < n; ++k) {
    const double az = first_azimuth + 2.0 * kPi * static_cast<double>(k) / static_cast<double>(n);
    l.speakers.push_back(spherical_to_position(Direction(az, 0.0), radius));
  }
  return l;
}

LoudspeakerLayout quad(double radius) {
  LoudspeakerLayout l = ring(4, radius, deg_to_rad(45.0), "quad");
  return l;
}

LoudspeakerLayout itu_5_0(double radius) {
  LoudspeakerLayout l{"5.0", LayoutCategory::Irregular, {}};
  for (double az : {0.0, 30.0, -30.0, 110.0, -110.0})
    l.speakers.push_back(spherical_to_position(Direction::from_degrees(az), radius));
  return l;
}

LoudspeakerLayout cube(double radius) {
  LoudspeakerLayout l{"cube", LayoutCategory::Regular, {}};
  const double c = radius / std::sqrt(3.0);
  for (double z : {1.0, -1.0})
    for (double y : {1.0, -1.0})
      for (double x : {1.0, -1.0}) l.speakers.push_back({c * x, c * y, c * z});
  return l;
}

LoudspeakerLayout preset(std::string_view name) {
  if (name == "stereo") return stereo();
  if (name == "quad") return quad();
  if (name == "5.0" || name == "itu-5.0") return itu_5_0();
  if (name == "hexagon") return ring(6, 1.0, 0.0, "hexagon");
  if (name == "octagon") return ring(8, 1.0, 0.0, "octagon");
  if (name == "cube") return cube();
  throw ParameterError("unknown layout preset '" + std::string(name) + "'");
}

std::vector<std::string> preset_names() {
  return {"stereo", "quad", "5.0", "hexagon", "octagon", "cube"};
}

} // namespace layouts

ValidationReport validate_layout(const LoudspeakerLayout& layout) {
  if (layout.speakers.empty()) throw LayoutError("layout '" + layout.name + "' has no speakers");

  ValidationReport report;
  const std::size_t n = layout.speakers.size();
  bool geometry_ok = true;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& p = layout.speakers[i];
    const std::string where = "speakers[" + std::to_string(i) + "]";
    if (!is_finite(p)) {
      report.add("non_finite", where, "speaker position is not finite");
      geometry_ok = false;
    } else if (norm(p) < 1e-9) {
      report.add("zero_distance", where, "speaker coincides with the listener position");
      geometry_ok = false;
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (distance(p, layout.speakers[j]) < 1e-9)
        report.add("duplicate_position", where,
                   "speaker duplicates speakers[" + std::to_string(j) + "]");
    }
  }
  if (!geometry_ok) return report;

  const auto dirs = layout.directions();
  constexpr double kAngleTol = 1e-6;

  if (layout.category == LayoutCategory::Regular) {
    if (!layout.is_equidistant(1e-6))
      report.add("unequal_radius", "speakers", "regular layout requires equal speaker distances");
    if (n >= 2 && layout.is_horizontal(kAngleTol)) {
      std::vector<double> az;
      for (const auto& d : dirs) az.push_back(d.azimuth());
      std::sort(az.begin(), az.end());
      const double expected = 2.0 * kPi / static_cast<double>(n);
      for (std::size_t k = 0; k < n; ++k) {
        double gap = (k + 1 < n) ? az[k + 1] - az[k] : az[0] + 2.0 * kPi - az[k];
        if (std::abs(gap - expected) > kAngleTol) {
          report.add("unequal_spacing", "speakers", "regular ring requires equal angular spacing");
          break;
        }
      }
    } else if (n >= 2) {
      // Polyhedra: every speaker must see its nearest neighbour at the same angle.
      std::vector<double> nearest(n, kPi);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
          if (i != j) nearest[i] = std::min(nearest[i], angular_distance(dirs[i], dirs[j]));
      const auto [lo, hi] = std::minmax_element(nearest.begin(), nearest.end());
      if (*hi - *lo > kAngleTol)
        report.add("unequal_spacing", "speakers", "regular polyhedron requires equal neighbour spacing");
    }
  } else if (layout.category == LayoutCategory::DiametricPairs) {
    std::vector<bool> matched(n, false);
    for (std::size_t i = 0; i < n; ++i) {
      if (matched[i]) continue;
      const Vec3 anti = -direction_to_unit_vector(dirs[i]);
      bool found = false;
      for (std::size_t j = i + 1; j < n && !found; ++j) {
        if (matched[j]) continue;
        if (angular_distance(Direction::from_vector(anti), dirs[j]) <= kAngleTol) {
          matched[i] = matched[j] = true;
          found = true;
        }
      }
      if (!found)
        report.add("unpaired_speaker", "speakers[" + std::to_string(i) + "]",
                   "speaker has no diametrically opposite partner");
    }
  }
  return report;
}

// ---------------------------------------------------------------------------
// Convex hulls

namespace {

double extent(std::span<const Position> pts) {
  double e = 0.0;
  for (const auto& p : pts)
    e = std::max({e, std::abs(p.x), std::abs(p.y), std::abs(p.z)});
  return e;
}

double cross2(double ox, double oy, double ax, double ay, double bx, double by) {
  return (ax - ox) * (by - oy) - (ay - oy) * (bx - ox);
}

// Monotone chain over in-plane coordinates. Returns counterclockwise vertex indices
// starting at the lowest (s, t) point, collinear boundary points excluded.
std::vector<std::size_t> monotone_chain(const std::vector<std::array<double, 2>>& st, double eps) {
  std::vector<std::size_t> order(st.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (st[a][0] != st[b][0]) return st[a][0] < st[b][0];
    if (st[a][1] != st[b][1]) return st[a][1] < st[b][1];
    return a < b;
  });
  std::vector<std::size_t> hull;
  auto turn = [&](std::size_t o, std::size_t a, std::size_t b) {
    return cross2(st[o][0], st[o][1], st[a][0], st[a][1], st[b][0], st[b][1]);
  };
  for (std::size_t idx : order) {
    while (hull.size() >= 2 && turn(hull[hull.size() - 2], hull.back(), idx) <= eps) hull.pop_back();
    hull.push_back(idx);
  }
  const std::size_t lower = hull.size() + 1;
  for (auto it = order.rbegin() + 1; it != order.rend(); ++it) {
    while (hull.size() >= lower && turn(hull[hull.size() - 2], hull.back(), *it) <= eps) hull.pop_back();
    hull.push_back(*it);
  }
  hull.pop_back();
  return hull;
}

Position closest_on_segment(Position p, Position a, Position b) {
  const Vec3 ab = b - a;
  const double len2 = dot(ab, ab);
  if (len2 == 0.0) return a;
  const double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
  return a + t * ab;
}

// Closest point on triangle abc (Ericson, Real-Time Collision Detection 5.1.5).
Position closest_on_triangle(Position p, Position a, Position b, Position c) {
  const Vec3 ab = b - a, ac = c - a, ap = p - a;
  const double d1 = dot(ab, ap), d2 = dot(ac, ap);
  if (d1 <= 0.0 && d2 <= 0.0) return a;
  const Vec3 bp = p - b;
  const double d3 = dot(ab, bp), d4 = dot(ac, bp);
  if (d3 >= 0.0 && d4 <= d3) return b;
  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) return a + (d1 / (d1 - d3)) * ab;
  const Vec3 cp = p - c;
  const double d5 = dot(ab, cp), d6 = dot(ac, cp);
  if (d6 >= 0.0 && d5 <= d6) return c;
  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) return a + (d2 / (d2 - d6)) * ac;
  const double va = d3 * d6 - d5 * d4;
  if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0)
    return b + ((d4 - d3) / ((d4 - d3) + (d5 - d6))) * (c - b);
  const double denom = 1.0 / (va + vb + vc);
  return a + (vb * denom) * ab + (vc * denom) * ac;
}

struct InitialSimplex {
  std::size_t i0 = 0, i1 = 0, i2 = 0, i3 = 0;
  int rank = 0; // 0 point, 1 segment, 2 plane, 3 solid
};

InitialSimplex find_simplex(std::span<const Position> pts, double eps) {
  InitialSimplex s;
  const std::size_t n = pts.size();
  for (std::size_t i = 1; i < n; ++i) {
    const auto& a = pts[i];
    const auto& b = pts[s.i0];
    if (std::tie(a.x, a.y, a.z) < std::tie(b.x, b.y, b.z)) s.i0 = i;
  }
  double best = -1.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = distance(pts[i], pts[s.i0]);
    if (d > best) { best = d; s.i1 = i; }
  }
  if (best <= eps) return s;
  s.rank = 1;
  const Vec3 axis = normalized(pts[s.i1] - pts[s.i0]);
  best = -1.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = norm(cross(pts[i] - pts[s.i0], axis));
    if (d > best) { best = d; s.i2 = i; }
  }
  if (best <= eps) return s;
  s.rank = 2;
  const Vec3 nrm = normalized(cross(pts[s.i1] - pts[s.i0], pts[s.i2] - pts[s.i0]));
  best = -1.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = std::abs(dot(pts[i] - pts[s.i0], nrm));
    if (d > best) { best = d; s.i3 = i; }
  }
  if (best <= eps) return s;
  s.rank = 3;
  return s;
}

ConvexHull::Face make_face(std::span<const Position> pts, std::size_t a, std::size_t b, std::size_t c,
                           Position interior) {
  Vec3 n = normalized(cross(pts[b] - pts[a], pts[c] - pts[a]));
  if (dot(n, interior) - dot(n, pts[a]) > 0.0) {
    std::swap(b, c);
    n = -n;
  }
  return {{a, b, c}, n, dot(n, pts[a])};
}

} // namespace

std::size_t ConvexHull::edge_count() const noexcept {
  switch (kind_) {
  case Kind::Point: return 0;
  case Kind::Segment: return 1;
  case Kind::Polygon: return vertex_indices_.size();
  case Kind::Polyhedron: return faces_.size() * 3 / 2;
  }
  return 0;
}

double ConvexHull::constraint_violation(Position p) const {
  switch (kind_) {
  case Kind::Point: return distance(p, vertex(0));
  case Kind::Segment: return distance(p, closest_on_segment(p, vertex(0), vertex(1)));
  case Kind::Polygon: {
    const Vec3 rel = p - origin_;
    double worst = std::abs(dot(rel, normal_));
    const std::size_t m = vertex_indices_.size();
    for (std::size_t k = 0; k < m; ++k) {
      const Position a = vertex(k);
      const Position b = vertex((k + 1) % m);
      const Vec3 outward = normalized(cross(b - a, normal_));
      worst = std::max(worst, dot(p - a, outward));
    }
    return worst;
  }
  case Kind::Polyhedron: {
    double worst = -std::numeric_limits<double>::infinity();
    for (const auto& f : faces_) worst = std::max(worst, dot(f.normal, p) - f.offset);
    return worst;
  }
  }
  return 0.0;
}

ConvexHull convex_hull(std::span<const Position> points, int dimensionality) {
  if (dimensionality != 2 && dimensionality != 3)
    throw ParameterError("hull dimensionality must be 2 or 3");
  for (const auto& p : points)
    if (!is_finite(p)) throw ParameterError("hull input contains a non-finite point");

  ConvexHull hull;
  const double scale = std::max(extent(points), 1e-300);

  if (dimensionality == 2) {
    if (points.size() < 3)
      throw DegenerateGeometryError("2-D hull needs at least 3 non-collinear points, got " +
                                    std::to_string(points.size()));
    double zmean = 0.0;
    for (const auto& p : points) zmean += p.z;
    zmean /= static_cast<double>(points.size());
    std::vector<std::array<double, 2>> st;
    for (const auto& p : points) {
      st.push_back({p.x, p.y});
      hull.points_.push_back({p.x, p.y, zmean});
    }
    auto idx = monotone_chain(st, 1e-12 * scale * scale);
    if (idx.size() < 3)
      throw DegenerateGeometryError("2-D hull input is collinear: all " + std::to_string(points.size()) +
                                    " points lie on one line");
    hull.kind_ = ConvexHull::Kind::Polygon;
    hull.vertex_indices_ = std::move(idx);
    hull.origin_ = {0.0, 0.0, zmean};
    return hull;
  }

  if (points.size() < 4)
    throw DegenerateGeometryError("3-D hull needs at least 4 non-coplanar points, got " +
                                  std::to_string(points.size()));
  const double eps = 1e-12 * scale;
  const InitialSimplex s = find_simplex(points, eps);
  if (s.rank < 3)
    throw DegenerateGeometryError(s.rank == 2 ? "3-D hull input is coplanar: all points lie in one plane"
                                              : "3-D hull input is collinear: all points lie on one line");

  hull.points_.assign(points.begin(), points.end());
  const Position interior =
      0.25 * (points[s.i0] + points[s.i1] + points[s.i2] + points[s.i3]);

  std::vector<ConvexHull::Face> faces;
  std::vector<bool> alive;
  auto add = [&](std::size_t a, std::size_t b, std::size_t c) {
    faces.push_back(make_face(points, a, b, c, interior));
    alive.push_back(true);
  };
  add(s.i0, s.i1, s.i2);
  add(s.i0, s.i1, s.i3);
  add(s.i0, s.i2, s.i3);
  add(s.i1, s.i2, s.i3);

  for (std::size_t i = 0; i < points.size(); ++i) {
    if (i == s.i0 || i == s.i1 || i == s.i2 || i == s.i3) continue;
    const Position p = points[i];
    std::set<std::pair<std::size_t, std::size_t>> edges;
    bool any = false;
    for (std::size_t f = 0; f < faces.size(); ++f) {
      if (!alive[f]) continue;
      if (dot(faces[f].normal, p) - faces[f].offset > eps) {
        any = true;
        alive[f] = false;
        const auto& v = faces[f].vertices;
        edges.insert({v[0], v[1]});
        edges.insert({v[1], v[2]});
        edges.insert({v[2], v[0]});
      }
    }
    if (!any) continue;
    for (const auto& [a, b] : edges)
      if (!edges.count({b, a})) add(a, b, i);
  }

  std::set<std::size_t> verts;
  for (std::size_t f = 0; f < faces.size(); ++f) {
    if (!alive[f]) continue;
    auto face = faces[f];
    auto& v = face.vertices;
    std::rotate(v.begin(), std::min_element(v.begin(), v.end()), v.end());
    hull.faces_.push_back(face);
    verts.insert(v.begin(), v.end());
  }
  std::sort(hull.faces_.begin(), hull.faces_.end(),
            [](const auto& a, const auto& b) { return a.vertices < b.vertices; });
  hull.vertex_indices_.assign(verts.begin(), verts.end());
  hull.kind_ = ConvexHull::Kind::Polyhedron;
  return hull;
}

ConvexHull convex_hull_any(std::span<const Position> points) {
  if (points.empty()) throw DegenerateGeometryError("hull of an empty point set");
  for (const auto& p : points)
    if (!is_finite(p)) throw ParameterError("hull input contains a non-finite point");
  const double scale = std::max(extent(points), 1e-300);
  const InitialSimplex s = find_simplex(points, 1e-12 * scale);
  if (s.rank == 3) return convex_hull(points, 3);

  ConvexHull hull;
  hull.points_.assign(points.begin(), points.end());
  if (s.rank == 0) {
    hull.kind_ = ConvexHull::Kind::Point;
    hull.vertex_indices_ = {s.i0};
    return hull;
  }
  if (s.rank == 1) {
    // Extreme points along the spanned line.
    const Vec3 axis = normalized(points[s.i1] - points[s.i0]);
    std::size_t lo = s.i0, hi = s.i0;
    double tlo = 0.0, thi = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
      const double t = dot(points[i] - points[s.i0], axis);
      if (t < tlo) { tlo = t; lo = i; }
      if (t > thi) { thi = t; hi = i; }
    }
    hull.kind_ = ConvexHull::Kind::Segment;
    hull.vertex_indices_ = {lo, hi};
    return hull;
  }

  // Coplanar: hull polygon in the spanned plane.
  const Vec3 u = normalized(points[s.i1] - points[s.i0]);
  const Vec3 n = normalized(cross(u, points[s.i2] - points[s.i0]));
  const Vec3 v = cross(n, u);
  std::vector<std::array<double, 2>> st;
  for (const auto& p : points) st.push_back({dot(p - points[s.i0], u), dot(p - points[s.i0], v)});
  hull.kind_ = ConvexHull::Kind::Polygon;
  hull.vertex_indices_ = monotone_chain(st, 1e-12 * scale * scale);
  hull.origin_ = points[s.i0];
  hull.u_ = u;
  hull.v_ = v;
  hull.normal_ = n;
  return hull;
}

std::pair<Position, double> closest_point_on_hull(const ConvexHull& hull, Position p) {
  switch (hull.kind_) {
  case ConvexHull::Kind::Point: {
    const Position q = hull.vertex(0);
    return {q, distance(p, q)};
  }
  case ConvexHull::Kind::Segment: {
    const Position q = closest_on_segment(p, hull.vertex(0), hull.vertex(1));
    const double d = distance(p, q);
    return d == 0.0 ? std::pair{p, 0.0} : std::pair{q, d};
  }
  case ConvexHull::Kind::Polygon: {
    if (hull.constraint_violation(p) <= 0.0) return {p, 0.0};
    const Vec3 rel = p - hull.origin_;
    const Position in_plane = p - dot(rel, hull.normal_) * hull.normal_;
    bool inside = true;
    const std::size_t m = hull.vertex_count();
    for (std::size_t k = 0; k < m && inside; ++k) {
      const Position a = hull.vertex(k);
      const Position b = hull.vertex((k + 1) % m);
      if (dot(cross(b - a, in_plane - a), hull.normal_) < 0.0) inside = false;
    }
    Position best = in_plane;
    if (!inside) {
      double best_d = std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < m; ++k) {
        const Position q = closest_on_segment(in_plane, hull.vertex(k), hull.vertex((k + 1) % m));
        const double d = distance(in_plane, q);
        if (d < best_d) { best_d = d; best = q; }
      }
    }
    return {best, distance(p, best)};
  }
  case ConvexHull::Kind::Polyhedron: {
    if (hull.constraint_violation(p) <= 0.0) return {p, 0.0};
    Position best{};
    double best_d = std::numeric_limits<double>::infinity();
    for (const auto& f : hull.faces_) {
      const Position q = closest_on_triangle(p, hull.points_[f.vertices[0]], hull.points_[f.vertices[1]],
                                             hull.points_[f.vertices[2]]);
      const double d = distance(p, q);
      if (d < best_d) { best_d = d; best = q; }
    }
    return {best, best_d};
  }
  }
  return {p, 0.0};
}

} // namespace spatia
