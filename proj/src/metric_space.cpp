// Copyright 2026 The coarsekit Authors
// SPDX-License-Identifier: Apache-2.0

#include "coarsekit/metric_space.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <mutex>
#include <queue>
#include <shared_mutex>
#include <sstream>
#include <unordered_map>

#include "coarsekit/errors.hpp"
#include "coarsekit/parallel.hpp"

namespace coarsekit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLattice = 1048576.0;  // 2^20

std::vector<long long> lattice_key(std::span<const double> c) {
  std::vector<long long> key(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) key[i] = std::llround(c[i] * kLattice);
  return key;
}

bool is_dyadic(double w) {
  const double scaled = w * kLattice;
  return std::abs(w) < 1e6 && scaled == std::floor(scaled);
}

class EuclideanOracle final : public DistanceOracle {
 public:
  EuclideanOracle(std::size_t dim, std::vector<double> coords)
      : dim_(dim), coords_(std::move(coords)) {}

  double distance(std::size_t a, std::size_t b) const override {
    double s = 0.0;
    for (std::size_t k = 0; k < dim_; ++k) {
      const double d = coords_[a * dim_ + k] - coords_[b * dim_ + k];
      s += d * d;
    }
    return std::sqrt(s);
  }
  std::size_t size() const override { return dim_ == 0 ? 0 : coords_.size() / dim_; }

 private:
  std::size_t dim_;
  std::vector<double> coords_;
};

class MatrixOracle final : public DistanceOracle {
 public:
  MatrixOracle(std::size_t n, std::vector<double> m) : n_(n), m_(std::move(m)) {}

  double distance(std::size_t a, std::size_t b) const override { return m_[a * n_ + b]; }
  std::vector<double> row(std::size_t s) const override {
    return {m_.begin() + static_cast<std::ptrdiff_t>(s * n_),
            m_.begin() + static_cast<std::ptrdiff_t>((s + 1) * n_)};
  }
  double tolerance() const override {
    return std::all_of(m_.begin(), m_.end(), [](double w) { return std::isinf(w) || is_dyadic(w); })
               ? 0.0
               : 1e-9;
  }
  std::size_t size() const override { return n_; }

 private:
  std::size_t n_;
  std::vector<double> m_;
};

}  // namespace

const char* to_string(SpaceKind kind) {
  switch (kind) {
    case SpaceKind::grid: return "grid";
    case SpaceKind::geodesic_graph: return "geodesic-graph";
    case SpaceKind::closed_form: return "closed-form";
    case SpaceKind::product: return "product";
    case SpaceKind::quotient: return "quotient";
    case SpaceKind::cylinder: return "cylinder";
  }
  return "unknown";
}

std::vector<double> DistanceOracle::row(std::size_t source) const {
  std::vector<double> out(size());
  for (std::size_t b = 0; b < out.size(); ++b) out[b] = distance(source, b);
  return out;
}

std::vector<std::pair<std::size_t, double>> DistanceOracle::within(std::size_t source,
                                                                   double radius) const {
  std::vector<std::pair<std::size_t, double>> out;
  const auto r = row(source);
  for (std::size_t b = 0; b < r.size(); ++b)
    if (r[b] <= radius) out.emplace_back(b, r[b]);
  return out;
}

// ---------------------------------------------------------------------------
// GraphOracle

struct GraphOracle::Cache {
  mutable std::shared_mutex mutex;
  std::unordered_map<std::size_t, std::shared_ptr<const std::vector<double>>> rows;
};

GraphOracle::GraphOracle(std::size_t n, const std::vector<WeightedEdge>& edges)
    : offsets_(n + 1, 0), cache_(std::make_unique<Cache>()) {
  for (const auto& e : edges) {
    if (e.a >= n || e.b >= n)
      throw InputError("edge endpoint out of range: " + std::to_string(e.a) + " " +
                       std::to_string(e.b));
    if (!(e.weight >= 0.0) || std::isinf(e.weight))
      throw InputError("edge weight must be finite and nonnegative");
    ++offsets_[e.a + 1];
    ++offsets_[e.b + 1];
    exact_ = exact_ && is_dyadic(e.weight);
  }
  for (std::size_t i = 0; i < n; ++i) offsets_[i + 1] += offsets_[i];
  targets_.resize(offsets_[n]);
  weights_.resize(offsets_[n]);
  std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
  for (const auto& e : edges) {
    targets_[fill[e.a]] = e.b;
    weights_[fill[e.a]++] = e.weight;
    targets_[fill[e.b]] = e.a;
    weights_[fill[e.b]++] = e.weight;
  }
}

GraphOracle::~GraphOracle() = default;

std::vector<double> GraphOracle::row(std::size_t source) const {
  const std::size_t n = size();
  std::vector<double> dist(n, kInf);
  using Item = std::pair<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  dist[source] = 0.0;
  heap.emplace(0.0, source);
  while (!heap.empty()) {
    auto [d, u] = heap.top();
    heap.pop();
    if (d > dist[u]) continue;
    for (std::size_t k = offsets_[u]; k < offsets_[u + 1]; ++k) {
      const double nd = d + weights_[k];
      const std::size_t v = targets_[k];
      if (nd < dist[v]) {
        dist[v] = nd;
        heap.emplace(nd, v);
      }
    }
  }
  return dist;
}

std::vector<std::pair<std::size_t, double>> GraphOracle::within(std::size_t source,
                                                                double radius) const {
  std::unordered_map<std::size_t, double> dist;
  using Item = std::pair<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  dist[source] = 0.0;
  heap.emplace(0.0, source);
  while (!heap.empty()) {
    auto [d, u] = heap.top();
    heap.pop();
    if (d > dist[u]) continue;
    for (std::size_t k = offsets_[u]; k < offsets_[u + 1]; ++k) {
      const double nd = d + weights_[k];
      if (nd > radius) continue;
      const std::size_t v = targets_[k];
      auto it = dist.find(v);
      if (it == dist.end() || nd < it->second) {
        dist[v] = nd;
        heap.emplace(nd, v);
      }
    }
  }
  std::vector<std::pair<std::size_t, double>> out(dist.begin(), dist.end());
  std::sort(out.begin(), out.end());
  return out;
}

std::shared_ptr<const std::vector<double>> GraphOracle::cached_row(std::size_t source) const {
  {
    std::shared_lock lock(cache_->mutex);
    auto it = cache_->rows.find(source);
    if (it != cache_->rows.end()) return it->second;
  }
  auto computed = std::make_shared<const std::vector<double>>(row(source));
  std::unique_lock lock(cache_->mutex);
  // First writer wins; rows are deterministic so either copy is identical.
  auto [it, inserted] = cache_->rows.emplace(source, std::move(computed));
  return it->second;
}

double GraphOracle::distance(std::size_t a, std::size_t b) const {
  if (a == b) return 0.0;
  const std::size_t lo = std::min(a, b);
  const std::size_t hi = std::max(a, b);
  return (*cached_row(lo))[hi];
}

std::size_t GraphOracle::cached_rows() const {
  std::shared_lock lock(cache_->mutex);
  return cache_->rows.size();
}

void GraphOracle::clear_cache() const {
  std::unique_lock lock(cache_->mutex);
  cache_->rows.clear();
}

// ---------------------------------------------------------------------------
// MetricSpace

MetricSpace::MetricSpace(SpaceKind kind, std::shared_ptr<const DistanceOracle> oracle,
                         PointId basepoint, std::size_t coord_dim, std::vector<double> coords)
    : kind_(kind),
      oracle_(std::move(oracle)),
      basepoint_(basepoint),
      coord_dim_(coord_dim),
      coords_(std::move(coords)) {
  if (!oracle_) throw InputError("metric space needs a distance oracle");
  if (oracle_->size() == 0) throw InputError("metric space must be nonempty");
  if (basepoint_.index >= oracle_->size()) throw InputError("basepoint outside the space");
  if (coord_dim_ > 0) {
    if (coords_.size() != coord_dim_ * oracle_->size())
      throw InputError("coordinate array does not match point count");
    for (std::size_t i = 0; i < oracle_->size(); ++i)
      lookup_.emplace(lattice_key(this->coords(PointId{i})), i);
  }
}

void MetricSpace::check(PointId p) const {
  if (p.index >= size())
    throw InputError("unknown point id " + std::to_string(p.index) + " (space has " +
                     std::to_string(size()) + " points)");
}

double MetricSpace::distance(PointId a, PointId b) const {
  check(a);
  check(b);
  if (a == b) return 0.0;
  return oracle_->distance(a.index, b.index);
}

std::vector<double> MetricSpace::distances_from(PointId source) const {
  check(source);
  return oracle_->row(source.index);
}

std::vector<std::pair<PointId, double>> MetricSpace::distances_within(PointId source,
                                                                     double radius) const {
  check(source);
  std::vector<std::pair<PointId, double>> out;
  for (const auto& [p, d] : oracle_->within(source.index, radius)) out.emplace_back(PointId{p}, d);
  return out;
}

std::span<const double> MetricSpace::coords(PointId p) const {
  if (coord_dim_ == 0) return {};
  check(p);
  return {coords_.data() + p.index * coord_dim_, coord_dim_};
}

std::optional<PointId> MetricSpace::find(std::span<const double> c) const {
  if (c.size() != coord_dim_ || coord_dim_ == 0) return std::nullopt;
  auto it = lookup_.find(lattice_key(c));
  if (it == lookup_.end()) return std::nullopt;
  return PointId{it->second};
}

double MetricSpace::eccentricity() const {
  const auto r = oracle_->row(basepoint_.index);
  return *std::max_element(r.begin(), r.end());
}

double MetricSpace::diameter() const {
  const std::size_t n = size();
  const unsigned threads = resolve_threads(0);
  std::vector<double> best(std::max(1u, threads), 0.0);
  parallel_for(n, threads, [&](std::size_t lo, std::size_t hi, unsigned w) {
    for (std::size_t a = lo; a < hi; ++a) {
      const auto r = oracle_->row(a);
      best[w] = std::max(best[w], *std::max_element(r.begin(), r.end()));
    }
  });
  return *std::max_element(best.begin(), best.end());
}

// ---------------------------------------------------------------------------

BoundedSet BoundedSet::none(const MetricSpace& space) {
  return BoundedSet{space.shared_from_this(), space.basepoint(), 0.0, true};
}

BoundedSet BoundedSet::around(const MetricSpace& space, PointId center, double radius) {
  space.check(center);
  if (!(radius >= 0.0)) throw InputError("bounded set radius must be nonnegative");
  return BoundedSet{space.shared_from_this(), center, radius, false};
}

bool BoundedSet::contains(PointId p) const {
  if (empty || !space) return false;
  return space->distance(center, p) <= radius;
}

unsigned resolve_threads(unsigned requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("COARSEKIT_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<unsigned>(v);
  }
  return 1;
}

SpacePtr build_euclidean_space(std::size_t dim, std::vector<double> coords, PointId basepoint) {
  auto oracle = std::make_shared<EuclideanOracle>(dim, coords);
  return std::make_shared<MetricSpace>(SpaceKind::closed_form, oracle, basepoint, dim,
                                       std::move(coords));
}

SpacePtr build_grid_space(int dim, double extent, double step) {
  if (dim != 1 && dim != 2) throw InputError("grid dimension must be 1 or 2");
  if (!(step > 0.0)) throw InputError("grid step must be positive");
  if (!(extent >= step)) throw InputError("grid extent must be at least one step");
  const auto per_axis = static_cast<std::size_t>(std::floor(extent / step + 1e-9)) + 1;
  std::vector<double> coords;
  if (dim == 1) {
    for (std::size_t i = 0; i < per_axis; ++i) coords.push_back(static_cast<double>(i) * step);
  } else {
    for (std::size_t i = 0; i < per_axis; ++i)
      for (std::size_t j = 0; j < per_axis; ++j) {
        coords.push_back(static_cast<double>(i) * step);
        coords.push_back(static_cast<double>(j) * step);
      }
  }
  const auto d = static_cast<std::size_t>(dim);
  auto oracle = std::make_shared<EuclideanOracle>(d, coords);
  return std::make_shared<MetricSpace>(SpaceKind::grid, oracle, PointId{0}, d, std::move(coords));
}

SpacePtr build_graph_space(std::size_t n, const std::vector<WeightedEdge>& edges,
                           PointId basepoint, std::size_t coord_dim, std::vector<double> coords) {
  if (n == 0) throw InputError("graph space needs at least one point");
  auto oracle = std::make_shared<GraphOracle>(n, edges);
  // Union-find over the edges: every point must be reachable.
  std::vector<std::size_t> parent(n);
  for (std::size_t i = 0; i < n; ++i) parent[i] = i;
  auto root = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  std::size_t components = n;
  for (const auto& e : edges) {
    const auto ra = root(e.a), rb = root(e.b);
    if (ra != rb) parent[ra] = rb, --components;
  }
  if (components != 1)
    throw InputError("graph is disconnected (" + std::to_string(components) + " components)");
  return std::make_shared<MetricSpace>(SpaceKind::geodesic_graph, oracle, basepoint, coord_dim,
                                       std::move(coords));
}

SpacePtr build_matrix_space(SpaceKind kind, std::size_t n, std::vector<double> matrix,
                            PointId basepoint, std::size_t coord_dim, std::vector<double> coords) {
  if (matrix.size() != n * n) throw InputError("distance matrix must be n*n");
  auto oracle = std::make_shared<MatrixOracle>(n, std::move(matrix));
  return std::make_shared<MetricSpace>(kind, oracle, basepoint, coord_dim, std::move(coords));
}

double distance(const MetricSpace& space, PointId a, PointId b) { return space.distance(a, b); }

std::vector<PointId> ball(const MetricSpace& space, PointId center, double radius) {
  if (!(radius >= 0.0)) throw InputError("ball radius must be nonnegative");
  const auto row = space.distances_from(center);
  std::vector<PointId> out;
  for (std::size_t i = 0; i < row.size(); ++i)
    if (row[i] <= radius) out.push_back(PointId{i});
  return out;
}

std::vector<PointId> outside(const MetricSpace& space, const BoundedSet& k) {
  if (k.space.get() != &space) throw InputError("bounded set belongs to a different space");
  std::vector<PointId> out;
  if (k.empty) {
    for (std::size_t i = 0; i < space.size(); ++i) out.push_back(PointId{i});
    return out;
  }
  const auto row = space.distances_from(k.center);
  for (std::size_t i = 0; i < row.size(); ++i)
    if (row[i] > k.radius) out.push_back(PointId{i});
  return out;
}

std::vector<WeightedEdge> parse_edge_list(const std::string& text) {
  std::vector<WeightedEdge> edges;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream ls(line);
    ls.imbue(std::locale::classic());
    long long a = -1, b = -1;
    double w = -1.0;
    std::string rest;
    if (!(ls >> a >> b >> w) || (ls >> rest) || a < 0 || b < 0)
      throw InputError("edge list line " + std::to_string(lineno) + ": expected \"i j w\"");
    edges.push_back({static_cast<std::size_t>(a), static_cast<std::size_t>(b), w});
  }
  return edges;
}

}  // namespace coarsekit
