// Copyright 2026 The coarsekit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <compare>
#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace coarsekit {

/// Index of a point within one space. Enumeration order is fixed when the
/// space is built (lexicographic on coordinates for coordinate spaces).
struct PointId {
  std::size_t index = 0;

  auto operator<=>(const PointId&) const = default;
};

enum class SpaceKind { grid, geodesic_graph, closed_form, product, quotient, cylinder };

const char* to_string(SpaceKind kind);

/// Distance backend. Implementations must be safe for concurrent const use.
class DistanceOracle {
 public:
  virtual ~DistanceOracle() = default;
  virtual double distance(std::size_t a, std::size_t b) const = 0;
  /// Distances from `source` to every point, without touching any cache.
  virtual std::vector<double> row(std::size_t source) const;
  /// (point, distance) for every point within `radius` of `source`, sorted by id.
  virtual std::vector<std::pair<std::size_t, double>> within(std::size_t source,
                                                             double radius) const;
  /// Comparison slack for metric axioms; 0 means exact arithmetic.
  virtual double tolerance() const { return 1e-9; }
  virtual std::size_t size() const = 0;
};

struct WeightedEdge {
  std::size_t a = 0;
  std::size_t b = 0;
  double weight = 0.0;
};

/// Shortest-path metric on an undirected weighted graph. Single-source rows
/// are computed on demand and cached; the cache is guarded for concurrent
/// population and d(a,b) always reads the row of min(a,b).
class GraphOracle final : public DistanceOracle {
 public:
  GraphOracle(std::size_t n, const std::vector<WeightedEdge>& edges);
  ~GraphOracle() override;

  double distance(std::size_t a, std::size_t b) const override;
  std::vector<double> row(std::size_t source) const override;
  std::vector<std::pair<std::size_t, double>> within(std::size_t source,
                                                     double radius) const override;
  double tolerance() const override { return exact_ ? 0.0 : 1e-9; }
  std::size_t size() const override { return offsets_.size() - 1; }

  std::size_t edge_count() const { return targets_.size() / 2; }
  std::size_t cached_rows() const;
  /// Drops all cached rows (memory control for large scans).
  void clear_cache() const;

 private:
  std::shared_ptr<const std::vector<double>> cached_row(std::size_t source) const;

  std::vector<std::size_t> offsets_;
  std::vector<std::size_t> targets_;
  std::vector<double> weights_;
  bool exact_ = true;
  struct Cache;
  std::unique_ptr<Cache> cache_;
};

/// Discrete metric space: a fixed point set, a distance oracle, optional
/// coordinates and a basepoint. Immutable after construction.
class MetricSpace : public std::enable_shared_from_this<MetricSpace> {
 public:
  MetricSpace(SpaceKind kind, std::shared_ptr<const DistanceOracle> oracle, PointId basepoint,
              std::size_t coord_dim = 0, std::vector<double> coords = {});

  SpaceKind kind() const { return kind_; }
  std::size_t size() const { return oracle_->size(); }
  PointId basepoint() const { return basepoint_; }
  double tolerance() const { return oracle_->tolerance(); }

  /// Throws InputError for ids outside the space.
  double distance(PointId a, PointId b) const;
  std::vector<double> distances_from(PointId source) const;
  std::vector<std::pair<PointId, double>> distances_within(PointId source, double radius) const;
  void check(PointId p) const;

  std::size_t coord_dim() const { return coord_dim_; }
  std::span<const double> coords(PointId p) const;
  /// Point with exactly these coordinates (matched on a 2^-20 lattice).
  std::optional<PointId> find(std::span<const double> coords) const;

  const DistanceOracle& oracle() const { return *oracle_; }
  std::shared_ptr<const DistanceOracle> oracle_ptr() const { return oracle_; }

  /// max over p of d(basepoint, p).
  double eccentricity() const;
  /// max over all pairs; O(n) rows.
  double diameter() const;

 private:
  SpaceKind kind_;
  std::shared_ptr<const DistanceOracle> oracle_;
  PointId basepoint_;
  std::size_t coord_dim_;
  std::vector<double> coords_;
  std::map<std::vector<long long>, std::size_t> lookup_;
};

using SpacePtr = std::shared_ptr<const MetricSpace>;

/// Ball {p : d(center, p) <= radius} in `space`. `empty` marks the empty
/// bounded set, used when a certificate needs no exceptional region at all.
struct BoundedSet {
  SpacePtr space;
  PointId center;
  double radius = 0.0;
  bool empty = false;

  static BoundedSet none(const MetricSpace& space);
  static BoundedSet around(const MetricSpace& space, PointId center, double radius);
  bool contains(PointId p) const;
};

/// Points of {0, step, ..., extent}^dim with the Euclidean metric.
SpacePtr build_grid_space(int dim, double extent, double step);

/// Closed-form Euclidean metric over explicit coordinates.
SpacePtr build_euclidean_space(std::size_t dim, std::vector<double> coords, PointId basepoint);

SpacePtr build_graph_space(std::size_t n, const std::vector<WeightedEdge>& edges,
                           PointId basepoint, std::size_t coord_dim = 0,
                           std::vector<double> coords = {});

/// Dense symmetric distance matrix (row-major, n*n).
SpacePtr build_matrix_space(SpaceKind kind, std::size_t n, std::vector<double> matrix,
                            PointId basepoint, std::size_t coord_dim = 0,
                            std::vector<double> coords = {});

double distance(const MetricSpace& space, PointId a, PointId b);
std::vector<PointId> ball(const MetricSpace& space, PointId center, double radius);
std::vector<PointId> outside(const MetricSpace& space, const BoundedSet& k);

/// Parses "i j w" lines; blank lines and '#' comments are skipped.
std::vector<WeightedEdge> parse_edge_list(const std::string& text);

}  // namespace coarsekit
