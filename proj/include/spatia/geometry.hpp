#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "spatia/error.hpp"

namespace spatia {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kSpeedOfSound = 343.0; // m/s

constexpr double deg_to_rad(double deg) noexcept { return deg * (kPi / 180.0); }
constexpr double rad_to_deg(double rad) noexcept { return rad * (180.0 / kPi); }

/// Wraps an angle into (-pi, pi].
double wrap_angle(double radians) noexcept;

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend constexpr Vec3 operator+(Vec3 a, Vec3 b) noexcept { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
  friend constexpr Vec3 operator-(Vec3 a, Vec3 b) noexcept { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
  friend constexpr Vec3 operator-(Vec3 a) noexcept { return {-a.x, -a.y, -a.z}; }
  friend constexpr Vec3 operator*(double s, Vec3 a) noexcept { return {s * a.x, s * a.y, s * a.z}; }
  friend constexpr Vec3 operator*(Vec3 a, double s) noexcept { return s * a; }
  friend constexpr bool operator==(Vec3, Vec3) noexcept = default;
};

constexpr double dot(Vec3 a, Vec3 b) noexcept { return a.x * b.x + a.y * b.y + a.z * b.z; }
constexpr Vec3 cross(Vec3 a, Vec3 b) noexcept {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm(Vec3 a) noexcept { return std::sqrt(dot(a, a)); }
inline double distance(Vec3 a, Vec3 b) noexcept { return norm(a - b); }
/// Unit vector along `a`; throws DegenerateGeometryError for the zero vector.
Vec3 normalized(Vec3 a);
inline bool is_finite(Vec3 a) noexcept {
  return std::isfinite(a.x) && std::isfinite(a.y) && std::isfinite(a.z);
}

/// Cartesian location in metres: x forward, y left, z up, listener at the origin.
using Position = Vec3;

/// Azimuth is counterclockwise-positive with 0 straight ahead, kept in (-pi, pi].
/// Elevation is 0 on the horizontal plane and +pi/2 at the zenith.
class Direction {
public:
  Direction() = default;
  /// Normalizes azimuth; throws ParameterError for non-finite input or |elevation| > pi/2.
  Direction(double azimuth, double elevation = 0.0);

  static Direction from_degrees(double azimuth_deg, double elevation_deg = 0.0) {
    return {deg_to_rad(azimuth_deg), deg_to_rad(elevation_deg)};
  }
  /// Direction of a non-zero vector. At the poles azimuth is canonicalized to 0.
  static Direction from_vector(Vec3 v);

  double azimuth() const noexcept { return azimuth_; }
  double elevation() const noexcept { return elevation_; }

private:
  double azimuth_ = 0.0;
  double elevation_ = 0.0;
};

/// (cos el cos az, cos el sin az, sin el).
Vec3 direction_to_unit_vector(const Direction& d) noexcept;
/// Great-circle angle between two directions, radians in [0, pi].
double angular_distance(const Direction& a, const Direction& b) noexcept;
Position spherical_to_position(const Direction& d, double distance_m) noexcept;

enum class LayoutCategory { Regular, DiametricPairs, Irregular };

std::string_view to_string(LayoutCategory c) noexcept;
/// Accepts "regular", "diametric-pairs", "irregular".
LayoutCategory parse_layout_category(std::string_view s);

struct LoudspeakerLayout {
  std::string name;
  LayoutCategory category = LayoutCategory::Irregular;
  std::vector<Position> speakers;

  std::size_t size() const noexcept { return speakers.size(); }
  Direction direction(std::size_t i) const { return Direction::from_vector(speakers.at(i)); }
  std::vector<Direction> directions() const;
  std::vector<double> distances() const;
  /// True when every speaker lies within `tol` radians of the horizontal plane.
  bool is_horizontal(double tol = 1e-6) const;
  /// True when all speaker distances agree within `rel_tol` of the largest.
  bool is_equidistant(double rel_tol = 1e-6) const;
};

namespace layouts {
/// Speakers at +half_angle (index 0, left) and -half_angle (index 1, right).
LoudspeakerLayout stereo(double half_angle = deg_to_rad(30.0), double radius = 1.0);
/// n speakers evenly spaced counterclockwise starting at `first_azimuth`.
LoudspeakerLayout ring(std::size_t n, double radius = 1.0, double first_azimuth = 0.0,
                       std::string name = {});
/// Speakers at 45, 135, -135, -45 degrees.
LoudspeakerLayout quad(double radius = 1.0);
/// ITU-R BS.775 5.0 ring: C, L, R, Ls, Rs at 0, 30, -30, 110, -110 degrees.
LoudspeakerLayout itu_5_0(double radius = 1.0);
LoudspeakerLayout cube(double radius = 1.0);
/// Looks up one of the named presets above ("stereo", "quad", "5.0", "hexagon", "octagon", "cube").
LoudspeakerLayout preset(std::string_view name);
std::vector<std::string> preset_names();
} // namespace layouts

/// Geometric checks only; throws LayoutError for an empty layout.
ValidationReport validate_layout(const LoudspeakerLayout& layout);

/// Convex hull of a point set. Degenerate sets collapse to lower-dimensional kinds
/// only through convex_hull_any(); convex_hull() rejects them.
class ConvexHull {
public:
  enum class Kind { Point, Segment, Polygon, Polyhedron };

  struct Face {
    std::array<std::size_t, 3> vertices; ///< indices into the input point list
    Vec3 normal;                         ///< outward unit normal
    double offset = 0.0;                 ///< normal . x <= offset inside
  };

  Kind kind() const noexcept { return kind_; }
  /// Hull vertices as indices into the input list. Polygons are counterclockwise
  /// about the plane normal; polyhedra are sorted ascending.
  const std::vector<std::size_t>& vertex_indices() const noexcept { return vertex_indices_; }
  const std::vector<Position>& points() const noexcept { return points_; }
  Position vertex(std::size_t k) const { return points_.at(vertex_indices_.at(k)); }
  std::size_t vertex_count() const noexcept { return vertex_indices_.size(); }
  /// Triangular faces (polyhedron only).
  const std::vector<Face>& faces() const noexcept { return faces_; }
  /// Number of polygon edges, or 12 for a cube etc. via faces().
  std::size_t edge_count() const noexcept;

  /// Plane frame of a polygon hull: origin, in-plane orthonormal axes and normal.
  Vec3 plane_origin() const noexcept { return origin_; }
  Vec3 plane_u() const noexcept { return u_; }
  Vec3 plane_v() const noexcept { return v_; }
  Vec3 plane_normal() const noexcept { return normal_; }

  /// Largest violation of the hull's constraints by `p`: <= 0 inside, > 0 outside.
  /// For lower-dimensional hulls the off-plane/off-line distance counts as violation.
  double constraint_violation(Position p) const;
  bool contains(Position p, double tol = 1e-9) const { return constraint_violation(p) <= tol; }

private:
  friend ConvexHull convex_hull(std::span<const Position>, int);
  friend ConvexHull convex_hull_any(std::span<const Position>);
  friend std::pair<Position, double> closest_point_on_hull(const ConvexHull&, Position);

  Kind kind_ = Kind::Point;
  std::vector<Position> points_;
  std::vector<std::size_t> vertex_indices_;
  std::vector<Face> faces_;
  Vec3 origin_{};
  Vec3 u_{1, 0, 0};
  Vec3 v_{0, 1, 0};
  Vec3 normal_{0, 0, 1};
};

/// dimensionality 2: hull of the points projected onto the horizontal plane
/// (z taken as the mean height). dimensionality 3: full polyhedron.
/// Throws DegenerateGeometryError for collinear (2-D) or coplanar (3-D) input.
ConvexHull convex_hull(std::span<const Position> points, int dimensionality);

/// Hull in the dimension the points actually span: polyhedron, polygon in the
/// spanned plane, segment, or single point.
ConvexHull convex_hull_any(std::span<const Position> points);

/// Closest point of the closed hull to `p` and its distance. Points inside the
/// hull are returned unchanged with distance 0.
std::pair<Position, double> closest_point_on_hull(const ConvexHull& hull, Position p);

} // namespace spatia
