#include "spatia/vbap.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace spatia {

namespace {

constexpr double kNegativeTolerance = 1e-9;

Vec3 planar(Vec3 v) { return normalized(Vec3{v.x, v.y, 0.0}); }

} // namespace

VectorBase::VectorBase(std::vector<std::size_t> speaker_indices, std::vector<Vec3> unit_vectors, int dimensionality)
    : indices_(std::move(speaker_indices)), vectors_(std::move(unit_vectors)), dim_(dimensionality) {
  if (dim_ != 2 && dim_ != 3) throw ParameterError("vector bases are 2-D or 3-D");
  if (indices_.size() != static_cast<std::size_t>(dim_) || vectors_.size() != indices_.size())
    throw DimensionError("a " + std::to_string(dim_) + "-D base needs exactly " + std::to_string(dim_) +
                         " speakers");
  for (auto& v : vectors_) v = normalized(v);
  if (dim_ == 2) {
    const Vec3 a = vectors_[0], b = vectors_[1];
    const double det = a.x * b.y - a.y * b.x;
    if (std::abs(det) < 1e-12)
      throw DegenerateGeometryError("speakers " + std::to_string(indices_[0]) + " and " +
                                    std::to_string(indices_[1]) + " are collinear with the listener");
    // L = [a; b], L^-1 = 1/det [[b.y, -a.y], [-b.x, a.x]]
    inverse_ = {b.y / det, -a.y / det, 0, -b.x / det, a.x / det, 0, 0, 0, 0};
  } else {
    const Vec3 a = vectors_[0], b = vectors_[1], c = vectors_[2];
    const double det = dot(a, cross(b, c));
    if (std::abs(det) < 1e-12)
      throw DegenerateGeometryError("speakers " + std::to_string(indices_[0]) + ", " + std::to_string(indices_[1]) +
                                    ", " + std::to_string(indices_[2]) + " are coplanar with the listener");
    // Columns of L^-1 are the reciprocal basis vectors.
    const Vec3 c0 = (1.0 / det) * cross(b, c);
    const Vec3 c1 = (1.0 / det) * cross(c, a);
    const Vec3 c2 = (1.0 / det) * cross(a, b);
    inverse_ = {c0.x, c1.x, c2.x, c0.y, c1.y, c2.y, c0.z, c1.z, c2.z};
  }
}

std::vector<double> VectorBase::solve(Vec3 p) const {
  const double pv[3] = {p.x, p.y, p.z};
  const std::size_t n = static_cast<std::size_t>(dim_);
  std::vector<double> g(n, 0.0);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i) g[j] += pv[i] * inverse_[i * 3 + j];
  return g;
}

BaseSet build_bases(const LoudspeakerLayout& layout, int dimensionality) {
  if (dimensionality != 2 && dimensionality != 3) throw ParameterError("dimensionality must be 2 or 3");
  if (!layout.is_equidistant())
    throw LayoutError("VBAP needs speakers equidistant from the listener; layout '" + layout.name +
                      "' has unequal distances");
  for (std::size_t i = 0; i < layout.size(); ++i)
    if (!is_finite(layout.speakers[i]) || norm(layout.speakers[i]) == 0.0)
      throw LayoutError("speaker " + std::to_string(i) + " has no usable direction");

  BaseSet set;
  set.dimensionality = dimensionality;
  set.speaker_count = layout.size();

  if (dimensionality == 2) {
    if (layout.size() < 2) throw LayoutError("2-D VBAP needs at least 2 speakers");
    std::vector<std::size_t> order(layout.size());
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> az(layout.size());
    for (std::size_t i = 0; i < layout.size(); ++i) az[i] = std::atan2(layout.speakers[i].y, layout.speakers[i].x);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return az[a] < az[b]; });
    for (std::size_t k = 0; k < order.size(); ++k) {
      const std::size_t a = order[k], b = order[(k + 1) % order.size()];
      double gap = az[b] - az[a];
      if (k + 1 == order.size()) gap += 2.0 * kPi;
      if (gap <= 1e-12 || gap >= kPi - 1e-12) continue; // antipodal or duplicate: singular
      set.bases.emplace_back(std::vector<std::size_t>{a, b},
                             std::vector<Vec3>{planar(layout.speakers[a]), planar(layout.speakers[b])}, 2);
    }
    if (set.bases.empty()) throw LayoutError("no valid speaker pair in layout '" + layout.name + "'");
    return set;
  }

  if (layout.size() < 3) throw LayoutError("3-D VBAP needs at least 3 speakers");
  std::vector<Position> units;
  for (const auto& s : layout.speakers) units.push_back(normalized(s));
  const ConvexHull hull = convex_hull_any(units);
  auto add = [&](std::size_t a, std::size_t b, std::size_t c) {
    set.bases.emplace_back(std::vector<std::size_t>{a, b, c}, std::vector<Vec3>{units[a], units[b], units[c]}, 3);
  };
  if (hull.kind() == ConvexHull::Kind::Polyhedron) {
    for (const auto& f : hull.faces())
      if (f.offset > 1e-9) add(f.vertices[0], f.vertices[1], f.vertices[2]);
  } else if (hull.kind() == ConvexHull::Kind::Polygon &&
             std::abs(dot(hull.plane_normal(), hull.plane_origin())) > 1e-9) {
    const auto& v = hull.vertex_indices();
    for (std::size_t k = 1; k + 1 < v.size(); ++k) add(v[0], v[k], v[k + 1]);
  }
  if (set.bases.empty())
    throw LayoutError("layout '" + layout.name + "' has no speaker triplet enclosing a solid angle; use 2-D VBAP");
  return set;
}

std::vector<double> solve_gains(const VectorBase& base, Vec3 p) { return base.solve(p); }

std::optional<std::size_t> pick_base(std::span<const std::vector<double>> candidate_gains) {
  std::optional<std::size_t> best;
  double best_min = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < candidate_gains.size(); ++i) {
    const auto& g = candidate_gains[i];
    if (g.empty()) continue;
    const double lo = *std::min_element(g.begin(), g.end());
    if (lo < -kNegativeTolerance) continue;
    if (!best || lo > best_min) {
      best = i;
      best_min = lo;
    }
  }
  return best;
}

BaseSelection select_base(const BaseSet& bases, Vec3 p) {
  std::vector<std::vector<double>> candidates;
  candidates.reserve(bases.bases.size());
  for (const auto& b : bases.bases) candidates.push_back(b.solve(p));
  const auto pick = pick_base(candidates);
  if (!pick) {
    const Direction d = Direction::from_vector(p);
    throw CoverageError("direction (az " + std::to_string(rad_to_deg(d.azimuth())) + " deg, el " +
                        std::to_string(rad_to_deg(d.elevation())) + " deg) is outside the speaker coverage");
  }
  BaseSelection sel{*pick, std::move(candidates[*pick])};
  for (double& g : sel.gains) g = std::max(g, 0.0);
  return sel;
}

std::vector<double> normalize_gains(std::span<const double> g, double power) {
  if (!(power > 0.0) || !std::isfinite(power)) throw ParameterError("power level C must be positive");
  double sq = 0.0;
  for (double v : g) sq += v * v;
  if (!(sq > 0.0) || !std::isfinite(sq)) throw NormalizationError("cannot normalize an all-zero gain vector");
  const double scale = std::sqrt(power) / std::sqrt(sq);
  std::vector<double> out(g.begin(), g.end());
  for (double& v : out) v *= scale;
  return out;
}

GainVector vbap_pan(const BaseSet& bases, const Direction& target, double power) {
  Vec3 p = direction_to_unit_vector(target);
  if (bases.dimensionality == 2) p = Vec3{std::cos(target.azimuth()), std::sin(target.azimuth()), 0.0};
  const auto sel = select_base(bases, p);
  const auto g = normalize_gains(sel.gains, power);
  GainVector out(bases.speaker_count);
  const auto& idx = bases.bases[sel.base_index].speaker_indices();
  for (std::size_t k = 0; k < idx.size(); ++k) out.gains[idx[k]] = g[k];
  return out;
}

GainVector vbap_pan(const LoudspeakerLayout& layout, int dimensionality, const Direction& target, double power) {
  return vbap_pan(build_bases(layout, dimensionality), target, power);
}

} // namespace spatia
