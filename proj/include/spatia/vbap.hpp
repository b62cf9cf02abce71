#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "spatia/gain_vector.hpp"
#include "spatia/geometry.hpp"

namespace spatia {

/// Two (2-D) or three (3-D) speakers with the inverse of their unit-vector matrix.
class VectorBase {
public:
  /// Throws DegenerateGeometryError if the speaker vectors are singular.
  VectorBase(std::vector<std::size_t> speaker_indices, std::vector<Vec3> unit_vectors, int dimensionality);

  const std::vector<std::size_t>& speaker_indices() const noexcept { return indices_; }
  std::size_t size() const noexcept { return indices_.size(); }
  int dimensionality() const noexcept { return dim_; }
  const Vec3& unit_vector(std::size_t k) const { return vectors_.at(k); }

  /// Raw gains g = p^T L^-1 (one per base speaker, may be negative).
  std::vector<double> solve(Vec3 p) const;

private:
  std::vector<std::size_t> indices_;
  std::vector<Vec3> vectors_;
  int dim_;
  std::array<double, 9> inverse_{}; // row-major dim x dim
};

struct BaseSet {
  std::vector<VectorBase> bases;
  int dimensionality = 2;
  std::size_t speaker_count = 0;
};

/// 2-D: adjacent azimuth pairs of a horizontal layout (gaps of pi or more are left
/// uncovered). 3-D: the faces of the convex hull of the speaker unit vectors that
/// enclose a solid angle around the listener.
/// Throws LayoutError for unequal speaker distances or when no base can be formed.
BaseSet build_bases(const LoudspeakerLayout& layout, int dimensionality);

/// Raw gains of `base` for target direction `p` (unit vector).
std::vector<double> solve_gains(const VectorBase& base, Vec3 p);

/// Index of the winning candidate among raw gain tuples: every gain must be at
/// least -1e-9; the tuple with the largest minimum gain wins, earliest on ties.
/// Empty if no candidate qualifies.
std::optional<std::size_t> pick_base(std::span<const std::vector<double>> candidate_gains);

struct BaseSelection {
  std::size_t base_index = 0;
  std::vector<double> gains; ///< clamped to >= 0
};

/// Throws CoverageError if no base has all gains non-negative.
BaseSelection select_base(const BaseSet& bases, Vec3 p);

/// sqrt(C) g / |g|. Throws NormalizationError for an all-zero vector, ParameterError unless C > 0.
std::vector<double> normalize_gains(std::span<const double> g, double power = 1.0);

/// Full-layout gains: zero outside the selected base.
GainVector vbap_pan(const BaseSet& bases, const Direction& target, double power = 1.0);
GainVector vbap_pan(const LoudspeakerLayout& layout, int dimensionality, const Direction& target,
                    double power = 1.0);

} // namespace spatia
