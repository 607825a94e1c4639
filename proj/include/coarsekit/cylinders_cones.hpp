// Copyright 2026 The coarsekit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <vector>

#include "coarsekit/coarse_maps.hpp"
#include "coarsekit/metric_space.hpp"

namespace coarsekit {

/// p : X -> [-1, inf)
struct HeightFunction {
  SpacePtr base;
  std::vector<double> values;

  static HeightFunction constant(SpacePtr base, double value);
};

/// I_pX = {(x, k*t_step) : k*t_step <= p(x) + 1} with the l2 product metric.
/// Points are ordered by base point, then by t.
class PCylinder {
 public:
  PCylinder(HeightFunction height, double t_step);

  const SpacePtr& space() const { return space_; }
  const SpacePtr& base() const { return height_.base; }
  const HeightFunction& height() const { return height_; }
  double t_step() const { return t_step_; }

  /// Number of t-levels in the column over x (always >= 1).
  std::size_t column_size(PointId x) const;
  PointId at(PointId x, std::size_t level) const;
  /// (base point, t-level) of a cylinder point.
  std::pair<PointId, std::size_t> split(PointId p) const;
  double t(PointId p) const { return static_cast<double>(split(p).second) * t_step_; }

  PointId i0(PointId x) const { return at(x, 0); }
  /// Largest grid t <= p(x) + 1.
  PointId i1(PointId x) const { return at(x, column_size(x) - 1); }

 private:
  HeightFunction height_;
  double t_step_;
  std::vector<std::size_t> offsets_;
  std::vector<std::size_t> owner_;
  SpacePtr space_;
};

using CylinderPtr = std::shared_ptr<const PCylinder>;

CylinderPtr p_cylinder(const HeightFunction& p, double t_step);

/// c([0,1]) = {(x,t) : 0 <= t <= x <= extent} on a square grid of `step`,
/// built as the p-cylinder over the R+ grid with p(x) = x - 1. Grid point
/// (i, k) means x = i*step, t = k*step.
class ConeInterval {
 public:
  ConeInterval(double extent, double step);

  const CylinderPtr& cylinder() const { return cyl_; }
  const SpacePtr& space() const { return cyl_->space(); }
  const SpacePtr& ray() const { return cyl_->base(); }
  double step() const { return step_; }
  std::size_t columns() const { return columns_; }

  PointId at(std::size_t i, std::size_t k) const { return cyl_->at(PointId{i}, k); }
  std::pair<std::size_t, std::size_t> split(PointId p) const {
    auto [x, k] = cyl_->split(p);
    return {x.index, k};
  }
  PointId i0(std::size_t i) const { return at(i, 0); }
  PointId i1(std::size_t i) const { return at(i, i); }
  bool on_boundary(PointId p) const;

 private:
  double step_;
  std::size_t columns_;
  CylinderPtr cyl_;
};

using ConeIntervalPtr = std::shared_ptr<const ConeInterval>;

ConeIntervalPtr cone_interval(double extent, double step);

using ModelPoint = std::array<double, 2>;

/// Flat manifold models. circle/torus are compact; line/plane are Hadamard
/// and are truncated to [-half_width, half_width]^dim.
class ManifoldModel {
 public:
  enum class Kind { circle, flat_torus, euclidean_line, euclidean_plane };

  static ManifoldModel circle(double circumference, double mesh);
  static ManifoldModel torus(double l1, double l2, double mesh);
  static ManifoldModel line(double half_width, double mesh);
  static ManifoldModel plane(double half_width, double mesh);

  Kind kind() const { return kind_; }
  int dim() const { return kind_ == Kind::circle || kind_ == Kind::euclidean_line ? 1 : 2; }
  double mesh() const { return mesh_; }
  bool hadamard() const { return kind_ == Kind::euclidean_line || kind_ == Kind::euclidean_plane; }
  /// Periods for compact kinds (0 for unbounded axes).
  ModelPoint periods() const { return periods_; }
  double half_width() const { return half_width_; }

  std::size_t mesh_size() const { return points_.size(); }
  const ModelPoint& mesh_point(std::size_t i) const { return points_[i]; }
  std::size_t mesh_basepoint() const { return base_; }
  std::optional<std::size_t> find_mesh(const ModelPoint& p) const;
  std::size_t nearest_mesh(const ModelPoint& p) const;

  double distance(const ModelPoint& a, const ModelPoint& b) const;
  /// Mesh neighbours with their model distances (8-neighbourhood in 2-D).
  std::vector<std::pair<std::size_t, double>> neighbours(std::size_t i) const;
  /// Reduces coordinates into the fundamental domain of compact kinds.
  ModelPoint wrap(const ModelPoint& p) const;
  /// Minimizing displacement from a to b; at exact half-period ties the
  /// lexicographically smallest (negative) direction is used.
  ModelPoint displacement(const ModelPoint& a, const ModelPoint& b) const;

  const char* kind_name() const;

 private:
  ManifoldModel(Kind kind, double mesh, ModelPoint periods, double half_width);

  Kind kind_;
  double mesh_;
  ModelPoint periods_;
  double half_width_;
  std::vector<ModelPoint> points_;
  std::size_t base_ = 0;
};

/// Discretized metric cone M x [1, t_max]: mesh(M) x {1, 1+t_step, ...}.
/// Horizontal edges at level t weigh t*d_M, vertical edges weigh t_step.
/// Vertex (m, k) has id m*levels + k and coordinates (model coords..., t).
class ConeSpace {
 public:
  ConeSpace(ManifoldModel model, double t_max, double t_step);

  const ManifoldModel& model() const { return model_; }
  const SpacePtr& space() const { return space_; }
  double t_max() const { return t_max_; }
  double t_step() const { return t_step_; }
  std::size_t levels() const { return levels_; }

  PointId vertex(std::size_t mesh_index, std::size_t level) const;
  std::pair<std::size_t, std::size_t> split(PointId p) const;
  const ModelPoint& model_point(PointId p) const { return model_.mesh_point(split(p).first); }
  double level_t(std::size_t level) const { return 1.0 + static_cast<double>(level) * t_step_; }
  double t(PointId p) const { return level_t(split(p).second); }
  std::size_t nearest_level(double t) const;
  /// Vertex nearest to (y, t) after wrapping y into the model.
  PointId snap(const ModelPoint& y, double t) const;

 private:
  ManifoldModel model_;
  double t_max_;
  double t_step_;
  std::size_t levels_;
  SpacePtr space_;
};

using ConePtr = std::shared_ptr<const ConeSpace>;

ConePtr metric_cone(const ManifoldModel& model, double t_max, double t_step);

/// Flat-cone closed form for two points at the same level with model
/// separation theta (valid while theta < pi).
double flat_cone_level_distance(double t, double theta);

struct ConeInequalityReport {
  Certification cert;
  /// Worst observed ratios: d / (|dt| + d_M t), |dt| / d, d_M / d.
  std::array<double, 3> worst_ratio{0.0, 0.0, 0.0};
  std::array<std::pair<PointId, PointId>, 3> worst_pair{};
};

ConeInequalityReport check_cone_inequalities(const ConeSpace& cone, std::size_t sample_count,
                                             double tolerance, std::uint64_t seed = 0);

/// gamma_x(s) toward p, clamped at p for s >= d(x, p). Hadamard models only.
ModelPoint geodesic_point(const ManifoldModel& model, const ModelPoint& x, const ModelPoint& p,
                          double s);

struct ConvexityReport {
  Certification cert;
  double worst_excess = 0.0;  // max of lhs - rhs
};

ConvexityReport check_cat0_convexity(const ManifoldModel& model, std::size_t trials,
                                     std::uint64_t seed = 0);

}  // namespace coarsekit
