// Copyright 2026 The coarsekit Authors
// SPDX-License-Identifier: Apache-2.0

#include "coarsekit/cylinders_cones.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "coarsekit/errors.hpp"

namespace coarsekit {

namespace {

constexpr double kEps = 1e-9;

std::size_t steps_in(double length, double step) {
  return static_cast<std::size_t>(std::floor(length / step + kEps));
}

class CylinderOracle final : public DistanceOracle {
 public:
  CylinderOracle(SpacePtr base, std::vector<std::size_t> owner, std::vector<double> t)
      : base_(std::move(base)), owner_(std::move(owner)), t_(std::move(t)) {}

  double distance(std::size_t a, std::size_t b) const override {
    const double dx = base_->distance(PointId{owner_[a]}, PointId{owner_[b]});
    const double dt = t_[a] - t_[b];
    return std::sqrt(dx * dx + dt * dt);
  }
  std::vector<double> row(std::size_t s) const override {
    const auto base_row = base_->distances_from(PointId{owner_[s]});
    std::vector<double> out(owner_.size());
    for (std::size_t b = 0; b < out.size(); ++b) {
      const double dx = base_row[owner_[b]];
      const double dt = t_[s] - t_[b];
      out[b] = std::sqrt(dx * dx + dt * dt);
    }
    return out;
  }
  std::size_t size() const override { return owner_.size(); }

 private:
  SpacePtr base_;
  std::vector<std::size_t> owner_;
  std::vector<double> t_;
};

int count_periodic_steps(double period, double mesh) {
  const double n = period / mesh;
  const double r = std::round(n);
  if (std::abs(n - r) > 1e-9 || r < 3) throw InputError("period must be a multiple (>= 3) of mesh");
  return static_cast<int>(r);
}

double wrap_axis(double v, double period) {
  if (period <= 0.0) return v;
  double w = std::fmod(v, period);
  if (w < 0.0) w += period;
  if (period - w < kEps) w = 0.0;
  return w;
}

double axis_displacement(double a, double b, double period) {
  double d = b - a;
  if (period <= 0.0) return d;
  d = std::fmod(d, period);
  if (d > period / 2.0 + kEps) d -= period;
  if (d < -period / 2.0 - kEps) d += period;
  if (std::abs(d - period / 2.0) <= kEps) d = -period / 2.0;
  return d;
}

}  // namespace

HeightFunction HeightFunction::constant(SpacePtr base, double value) {
  const std::size_t n = base->size();
  return HeightFunction{std::move(base), std::vector<double>(n, value)};
}

// ---------------------------------------------------------------------------
// PCylinder

PCylinder::PCylinder(HeightFunction height, double t_step)
    : height_(std::move(height)), t_step_(t_step) {
  if (!(t_step_ > 0.0)) throw InputError("cylinder t_step must be positive");
  if (!height_.base) throw InputError("height function needs a base space");
  const MetricSpace& base = *height_.base;
  if (height_.values.size() != base.size())
    throw InputError("height function must be defined on every base point");
  offsets_.assign(base.size() + 1, 0);
  for (std::size_t x = 0; x < base.size(); ++x) {
    const double p = height_.values[x];
    if (!(p >= -1.0 - kEps)) throw InputError("height function values must be >= -1");
    offsets_[x + 1] = offsets_[x] + steps_in(std::max(0.0, p + 1.0), t_step_) + 1;
  }
  const std::size_t n = offsets_.back();
  owner_.resize(n);
  std::vector<double> ts(n);
  const std::size_t bdim = base.coord_dim();
  std::vector<double> coords;
  if (bdim > 0) coords.reserve(n * (bdim + 1));
  for (std::size_t x = 0; x < base.size(); ++x) {
    for (std::size_t p = offsets_[x]; p < offsets_[x + 1]; ++p) {
      owner_[p] = x;
      ts[p] = static_cast<double>(p - offsets_[x]) * t_step_;
      if (bdim > 0) {
        const auto c = base.coords(PointId{x});
        coords.insert(coords.end(), c.begin(), c.end());
        coords.push_back(ts[p]);
      }
    }
  }
  auto oracle = std::make_shared<CylinderOracle>(height_.base, owner_, ts);
  space_ = std::make_shared<MetricSpace>(SpaceKind::cylinder, oracle,
                                         PointId{offsets_[base.basepoint().index]},
                                         bdim > 0 ? bdim + 1 : 0, std::move(coords));
}

std::size_t PCylinder::column_size(PointId x) const {
  height_.base->check(x);
  return offsets_[x.index + 1] - offsets_[x.index];
}

PointId PCylinder::at(PointId x, std::size_t level) const {
  if (level >= column_size(x))
    throw InputError("t-level " + std::to_string(level) + " outside the column over point " +
                     std::to_string(x.index));
  return PointId{offsets_[x.index] + level};
}

std::pair<PointId, std::size_t> PCylinder::split(PointId p) const {
  space_->check(p);
  const std::size_t x = owner_[p.index];
  return {PointId{x}, p.index - offsets_[x]};
}

CylinderPtr p_cylinder(const HeightFunction& p, double t_step) {
  return std::make_shared<const PCylinder>(p, t_step);
}

// ---------------------------------------------------------------------------
// ConeInterval

ConeInterval::ConeInterval(double extent, double step) : step_(step) {
  if (!(step > 0.0)) throw InputError("cone interval step must be positive");
  if (!(extent >= step)) throw InputError("cone interval extent must be at least one step");
  auto ray = build_grid_space(1, extent, step);
  columns_ = ray->size();
  HeightFunction p{ray, {}};
  for (std::size_t i = 0; i < columns_; ++i) p.values.push_back(static_cast<double>(i) * step - 1.0);
  cyl_ = std::make_shared<const PCylinder>(std::move(p), step);
}

bool ConeInterval::on_boundary(PointId p) const {
  auto [i, k] = split(p);
  return k == 0 || k == i;
}

ConeIntervalPtr cone_interval(double extent, double step) {
  return std::make_shared<const ConeInterval>(extent, step);
}

// ---------------------------------------------------------------------------
// ManifoldModel

ManifoldModel::ManifoldModel(Kind kind, double mesh, ModelPoint periods, double half_width)
    : kind_(kind), mesh_(mesh), periods_(periods), half_width_(half_width) {
  if (!(mesh > 0.0)) throw InputError("model mesh must be positive");
  switch (kind_) {
    case Kind::circle: {
      const int n = count_periodic_steps(periods_[0], mesh_);
      for (int i = 0; i < n; ++i) points_.push_back({i * mesh_, 0.0});
      break;
    }
    case Kind::flat_torus: {
      const int n1 = count_periodic_steps(periods_[0], mesh_);
      const int n2 = count_periodic_steps(periods_[1], mesh_);
      for (int i = 0; i < n1; ++i)
        for (int j = 0; j < n2; ++j) points_.push_back({i * mesh_, j * mesh_});
      break;
    }
    case Kind::euclidean_line:
    case Kind::euclidean_plane: {
      const double n = half_width_ / mesh_;
      if (!(half_width_ > 0.0) || std::abs(n - std::round(n)) > 1e-9)
        throw InputError("half width must be a positive multiple of mesh");
      const int h = static_cast<int>(std::round(n));
      if (kind_ == Kind::euclidean_line) {
        for (int i = -h; i <= h; ++i) points_.push_back({i * mesh_, 0.0});
      } else {
        for (int i = -h; i <= h; ++i)
          for (int j = -h; j <= h; ++j) points_.push_back({i * mesh_, j * mesh_});
      }
      base_ = *find_mesh({0.0, 0.0});
      break;
    }
  }
}

ManifoldModel ManifoldModel::circle(double circumference, double mesh) {
  return ManifoldModel(Kind::circle, mesh, {circumference, 0.0}, 0.0);
}
ManifoldModel ManifoldModel::torus(double l1, double l2, double mesh) {
  return ManifoldModel(Kind::flat_torus, mesh, {l1, l2}, 0.0);
}
ManifoldModel ManifoldModel::line(double half_width, double mesh) {
  return ManifoldModel(Kind::euclidean_line, mesh, {0.0, 0.0}, half_width);
}
ManifoldModel ManifoldModel::plane(double half_width, double mesh) {
  return ManifoldModel(Kind::euclidean_plane, mesh, {0.0, 0.0}, half_width);
}

const char* ManifoldModel::kind_name() const {
  switch (kind_) {
    case Kind::circle: return "circle";
    case Kind::flat_torus: return "flat-torus";
    case Kind::euclidean_line: return "euclidean-line";
    case Kind::euclidean_plane: return "euclidean-plane";
  }
  return "unknown";
}

ModelPoint ManifoldModel::wrap(const ModelPoint& p) const {
  return {wrap_axis(p[0], periods_[0]), dim() == 2 ? wrap_axis(p[1], periods_[1]) : 0.0};
}

ModelPoint ManifoldModel::displacement(const ModelPoint& a, const ModelPoint& b) const {
  return {axis_displacement(a[0], b[0], periods_[0]),
          dim() == 2 ? axis_displacement(a[1], b[1], periods_[1]) : 0.0};
}

double ManifoldModel::distance(const ModelPoint& a, const ModelPoint& b) const {
  const auto d = displacement(a, b);
  return std::hypot(d[0], d[1]);
}

namespace {

// Axis index for a coordinate; compact axes wrap, bounded axes clamp.
long axis_index(double v, double mesh, double period, double half_width, bool clamp) {
  if (period > 0.0) {
    const long n = std::lround(period / mesh);
    long i = std::lround(wrap_axis(v, period) / mesh);
    return ((i % n) + n) % n;
  }
  const long h = std::lround(half_width / mesh);
  long i = std::lround(v / mesh);
  if (clamp) i = std::clamp(i, -h, h);
  return i + h;
}

}  // namespace

std::optional<std::size_t> ManifoldModel::find_mesh(const ModelPoint& p) const {
  const std::size_t idx = nearest_mesh(p);
  const ModelPoint w = wrap(p);
  if (std::abs(points_[idx][0] - w[0]) > 1e-9 || std::abs(points_[idx][1] - w[1]) > 1e-9)
    return std::nullopt;
  return idx;
}

std::size_t ManifoldModel::nearest_mesh(const ModelPoint& p) const {
  const long i = axis_index(p[0], mesh_, periods_[0], half_width_, true);
  if (dim() == 1) return static_cast<std::size_t>(i);
  const long j = axis_index(p[1], mesh_, periods_[1], half_width_, true);
  const long n2 = periods_[1] > 0.0 ? std::lround(periods_[1] / mesh_)
                                    : 2 * std::lround(half_width_ / mesh_) + 1;
  return static_cast<std::size_t>(i * n2 + j);
}

std::vector<std::pair<std::size_t, double>> ManifoldModel::neighbours(std::size_t i) const {
  std::vector<std::pair<std::size_t, double>> out;
  const ModelPoint& p = points_.at(i);
  const int reach = 1;
  for (int di = -reach; di <= reach; ++di) {
    for (int dj = (dim() == 2 ? -reach : 0); dj <= (dim() == 2 ? reach : 0); ++dj) {
      if (di == 0 && dj == 0) continue;
      const ModelPoint q{p[0] + di * mesh_, p[1] + dj * mesh_};
      if (!hadamard() || (std::abs(q[0]) <= half_width_ + kEps &&
                          std::abs(q[1]) <= half_width_ + kEps)) {
        if (auto j = find_mesh(q)) out.emplace_back(*j, distance(p, points_[*j]));
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// ConeSpace

ConeSpace::ConeSpace(ManifoldModel model, double t_max, double t_step)
    : model_(std::move(model)), t_max_(t_max), t_step_(t_step) {
  if (!(t_step_ > 0.0)) throw InputError("cone t_step must be positive");
  if (!(t_max_ >= 1.0)) throw InputError("cone t_max must be at least 1");
  levels_ = steps_in(t_max_ - 1.0, t_step_) + 1;
  const std::size_t m = model_.mesh_size();
  const std::size_t n = m * levels_;
  const int dim = model_.dim();
  std::vector<WeightedEdge> edges;
  std::vector<double> coords;
  coords.reserve(n * static_cast<std::size_t>(dim + 1));
  for (std::size_t a = 0; a < m; ++a) {
    const auto nb = model_.neighbours(a);
    for (std::size_t k = 0; k < levels_; ++k) {
      const double t = level_t(k);
      const ModelPoint& y = model_.mesh_point(a);
      coords.push_back(y[0]);
      if (dim == 2) coords.push_back(y[1]);
      coords.push_back(t);
      if (k + 1 < levels_) edges.push_back({vertex(a, k).index, vertex(a, k + 1).index, t_step_});
      for (const auto& [b, dm] : nb)
        if (a < b) edges.push_back({vertex(a, k).index, vertex(b, k).index, t * dm});
    }
  }
  space_ = build_graph_space(n, edges, vertex(model_.mesh_basepoint(), 0),
                             static_cast<std::size_t>(dim + 1), std::move(coords));
}

PointId ConeSpace::vertex(std::size_t mesh_index, std::size_t level) const {
  if (mesh_index >= model_.mesh_size() || level >= levels_)
    throw InputError("cone vertex out of range");
  return PointId{mesh_index * levels_ + level};
}

std::pair<std::size_t, std::size_t> ConeSpace::split(PointId p) const {
  if (p.index >= model_.mesh_size() * levels_) throw InputError("cone vertex out of range");
  return {p.index / levels_, p.index % levels_};
}

std::size_t ConeSpace::nearest_level(double t) const {
  const double k = std::round((t - 1.0) / t_step_);
  if (k <= 0.0) return 0;
  return std::min(levels_ - 1, static_cast<std::size_t>(k));
}

PointId ConeSpace::snap(const ModelPoint& y, double t) const {
  return vertex(model_.nearest_mesh(y), nearest_level(t));
}

ConePtr metric_cone(const ManifoldModel& model, double t_max, double t_step) {
  return std::make_shared<const ConeSpace>(model, t_max, t_step);
}

double flat_cone_level_distance(double t, double theta) { return 2.0 * t * std::sin(theta / 2.0); }

ConeInequalityReport check_cone_inequalities(const ConeSpace& cone, std::size_t sample_count,
                                             double tolerance, std::uint64_t seed) {
  if (!(tolerance > 0.0 && tolerance < 1.0)) throw InputError("tolerance must lie in (0,1)");
  const MetricSpace& s = *cone.space();
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, s.size() - 1);
  ConeInequalityReport rep;
  std::size_t used = 0;
  for (std::size_t i = 0; i < sample_count; ++i) {
    const PointId a{pick(rng)}, b{pick(rng)};
    if (a == b) continue;
    ++used;
    const double d = s.distance(a, b);
    const double t = cone.t(a), tp = cone.t(b);
    const double dm = cone.model().distance(cone.model_point(a), cone.model_point(b));
    const std::array<double, 3> ratio{d / (std::abs(t - tp) + dm * t), std::abs(t - tp) / d,
                                      dm / d};
    for (int k = 0; k < 3; ++k)
      if (ratio[k] > rep.worst_ratio[k]) {
        rep.worst_ratio[k] = ratio[k];
        rep.worst_pair[k] = {a, b};
      }
  }
  rep.cert.param("samples", static_cast<double>(used));
  rep.cert.param("tolerance", tolerance);
  rep.cert.param("seed", static_cast<double>(seed));
  rep.cert.param("mesh", cone.model().mesh());
  rep.cert.param("t_step", cone.t_step());
  rep.cert.param("t_max", cone.t_max());
  static const char* names[3] = {"d <= |t-t'| + d_M t", "|t-t'| <= d", "d_M <= d"};
  rep.cert.verdict = Verdict::certified;
  for (int k = 0; k < 3; ++k) {
    rep.cert.trend.push_back({static_cast<double>(k), rep.worst_ratio[k]});
    if (rep.worst_ratio[k] > 1.0 + tolerance && rep.cert.verdict == Verdict::certified) {
      rep.cert.verdict = Verdict::refuted;
      rep.cert.witness = {rep.worst_pair[k].first, rep.worst_pair[k].second};
      rep.cert.witness_note = std::string("worst pair for ") + names[k];
    }
  }
  rep.cert.note = "trend rows: (inequality index, worst observed ratio)";
  return rep;
}

ModelPoint geodesic_point(const ManifoldModel& model, const ModelPoint& x, const ModelPoint& p,
                          double s) {
  if (!model.hadamard())
    throw InputError(std::string("geodesics to a point are not unique on ") + model.kind_name());
  if (!(s >= 0.0)) throw InputError("arclength must be nonnegative");
  const double d = std::hypot(p[0] - x[0], p[1] - x[1]);
  if (s >= d) return p;
  const double f = s / d;
  return {x[0] + (p[0] - x[0]) * f, x[1] + (p[1] - x[1]) * f};
}

ConvexityReport check_cat0_convexity(const ManifoldModel& model, std::size_t trials,
                                     std::uint64_t seed) {
  if (!model.hadamard())
    throw InputError(std::string("CAT(0) check needs a Hadamard model, got ") + model.kind_name());
  std::mt19937_64 rng(seed);
  const double w = model.half_width();
  std::uniform_real_distribution<double> coord(-w, w);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * M_PI);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> len(1e-3, 2.0 * w);
  const bool planar = model.dim() == 2;
  auto direction = [&] {
    if (planar) {
      const double a = angle(rng);
      return ModelPoint{std::cos(a), std::sin(a)};
    }
    return ModelPoint{unit(rng) < 0.5 ? -1.0 : 1.0, 0.0};
  };
  auto point = [&] { return ModelPoint{coord(rng), planar ? coord(rng) : 0.0}; };
  auto dist = [](const ModelPoint& a, const ModelPoint& b) {
    return std::hypot(a[0] - b[0], a[1] - b[1]);
  };

  ConvexityReport rep;
  for (std::size_t i = 0; i < trials; ++i) {
    const ModelPoint x1 = point(), x2 = point();
    const ModelPoint u1 = direction(), u2 = direction();
    const double q = len(rng), qp = len(rng), theta = unit(rng);
    // Far targets so the clamped geodesic is a genuine unit-speed ray on [0, q].
    const double reach = std::max(q, qp) + 1.0;
    const ModelPoint p1{x1[0] + u1[0] * reach, x1[1] + u1[1] * reach};
    const ModelPoint p2{x2[0] + u2[0] * reach, x2[1] + u2[1] * reach};
    const double lhs =
        dist(geodesic_point(model, x1, p1, theta * q), geodesic_point(model, x2, p2, theta * qp));
    const double rhs =
        std::max(dist(x1, x2), dist(geodesic_point(model, x1, p1, q), geodesic_point(model, x2, p2, qp)));
    rep.worst_excess = std::max(rep.worst_excess, lhs - rhs);
  }
  rep.cert.verdict = rep.worst_excess <= 1e-9 ? Verdict::certified : Verdict::refuted;
  rep.cert.param("trials", static_cast<double>(trials));
  rep.cert.param("seed", static_cast<double>(seed));
  rep.cert.param("worst_excess", rep.worst_excess);
  rep.cert.note = "max-convexity of unit-speed geodesic pairs, tolerance 1e-9";
  return rep;
}

}  // namespace coarsekit
