// Copyright 2026 The coarsekit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <compare>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "coarsekit/coarse_maps.hpp"
#include "coarsekit/cylinders_cones.hpp"
#include "coarsekit/metric_space.hpp"

namespace coarsekit {

/// Lattice groups: the integer coefficient vector over the generators.
/// Finite groups: the canonical (shortlex-first) word over generator indices.
struct GroupElement {
  std::vector<int> coords;

  auto operator<=>(const GroupElement&) const = default;
  bool is_identity() const;
  std::string str() const;
};

/// A group acting on a finite model by isometries. Lattice generators are
/// coordinate translations of the leading axes; on a truncated model an
/// element may be undefined at a point (its image leaves the model).
class GroupAction {
 public:
  enum class Kind { finite, lattice };

  static GroupAction lattice(SpacePtr space, std::vector<std::vector<double>> translations);
  static GroupAction finite(SpacePtr space, std::vector<std::vector<std::size_t>> permutations);
  static GroupAction trivial(SpacePtr space);

  Kind kind() const { return kind_; }
  const SpacePtr& space() const { return space_; }
  std::size_t generator_count() const;
  GroupElement identity() const;
  GroupElement generator(std::size_t i) const;
  GroupElement compose(const GroupElement& a, const GroupElement& b) const;
  GroupElement inverse(const GroupElement& a) const;

  /// Elements of word length <= radius, identity first, then by length and
  /// lexicographically.
  std::vector<GroupElement> elements(int word_radius) const;
  std::optional<PointId> apply(const GroupElement& g, PointId x) const;
  /// Points at which every element of the word ball is defined.
  std::vector<bool> interior_mask(int word_radius) const;
  /// Total order of a finite group (0 for lattices).
  std::size_t finite_order() const { return perms_.size(); }

 private:
  GroupAction(Kind kind, SpacePtr space) : kind_(kind), space_(std::move(space)) {}

  Kind kind_;
  SpacePtr space_;
  std::vector<std::vector<double>> translations_;
  std::vector<std::vector<std::size_t>> generators_;
  std::vector<std::vector<std::size_t>> perms_;
  std::vector<GroupElement> words_;
  std::map<std::vector<std::size_t>, std::size_t> perm_index_;
};

/// Checks d(g x, g y) = d(x, y) for every generator over all pairs where
/// both images exist (within the space tolerance).
Certification verify_isometries(const GroupAction& action, const ScanOptions& opts = {});

struct QuotientSpace {
  SpacePtr space;
  std::vector<std::size_t> class_of;
  std::vector<std::vector<PointId>> classes;
  CoarseMap q;
};

/// Orbits by generator closure inside the model (BFS depth <= orbit_horizon),
/// quotient metric = min over representative pairs.
QuotientSpace quotient_space(const GroupAction& action, int orbit_horizon, unsigned threads = 0);

struct Displacement {
  double value = 0.0;
  PointId point;
  GroupElement element;
  std::vector<PointId> fixed_points;
  bool free() const { return fixed_points.empty(); }
};

Displacement min_displacement(const GroupAction& action, int word_radius = 4);

struct DiscontinuityCertificate {
  double R = 0.0;
  BoundedSet K;
  /// Largest last coordinate (the cone level for cones) among points moved
  /// by at most R.
  double max_bad_height = 0.0;
  std::size_t bad_points = 0;
  int word_radius = 0;
  Certification cert;
};

DiscontinuityCertificate certify_uniform_coarse_discontinuity(const GroupAction& action, double R,
                                                              int word_radius = 4);

struct ScatterCertificate {
  double R = 0.0;
  BoundedSet K;  // in the target of q
  double max_bad_height = 0.0;
  Certification cert;
};

ScatterCertificate certify_scattered_fibres(const CoarseMap& q, double R);

struct SoftEntry {
  double R = 0.0;
  double S = 0.0;
  PointId x, y, x_prime;
};

struct SoftnessTable {
  std::vector<SoftEntry> rows;
  std::size_t scanned_points = 0;
  std::size_t excluded_points = 0;
};

/// S(R) = max over d(f(x), y) <= R of min over x' in f^{-1}(y) of d(x, x').
/// `mask` restricts the scanned x (boundary exclusion); ties go to the
/// smallest PointId.
SoftnessTable certify_soft_quotient(const CoarseMap& f, const std::vector<double>& R_grid,
                                    const std::vector<bool>& mask = {}, unsigned threads = 0);

/// Nearest point of f^{-1}(y) to x (ties to the smallest id); nullopt if the
/// fibre is empty.
std::optional<PointId> nearest_fibre_point(const CoarseMap& f, PointId x, PointId y);

struct LiftCertificate {
  std::vector<SoftEntry> softness;
  std::vector<ScatterCertificate> scatter;
  std::vector<DiscontinuityCertificate> discontinuity;
  std::vector<std::pair<std::string, double>> provenance;

  /// S at the smallest tabulated R' >= R; throws InputError if uncovered.
  double softness_at(double R) const;
  const ScatterCertificate& scatter_at(double R) const;
};

LiftCertificate build_lift_certificate(const CoarseMap& q, const std::vector<double>& soft_radii,
                                       const std::vector<double>& scatter_radii,
                                       const std::vector<bool>& mask = {}, unsigned threads = 0);

/// ∪_g g(K) over the word ball.
std::vector<PointId> saturate(const GroupAction& action, const BoundedSet& K, int word_radius);
/// q^{-1}(q(K)).
std::vector<PointId> preimage_of_image(const CoarseMap& q, const BoundedSet& K);
/// Radius around the basepoint of ∪_g g(K).
double saturation_radius(const GroupAction& action, const BoundedSet& K, int word_radius);

/// Cone over a compact flat model together with the cone over a truncated
/// piece of its universal cover, the covering map and the deck action.
struct ConeCovering {
  ConePtr cover;
  ConePtr base;
  CoarseMap pi;
  GroupAction action;
  std::vector<bool> interior;  // cover points with every generator translate
};

ConeCovering make_cone_covering(const ManifoldModel& compact, double cover_half_width,
                                double t_max, double t_step);

}  // namespace coarsekit
