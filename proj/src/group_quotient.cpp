// Copyright 2026 The coarsekit Authors
// SPDX-License-Identifier: Apache-2.0

#include "coarsekit/group_quotient.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>

#include "coarsekit/errors.hpp"
#include "coarsekit/parallel.hpp"

namespace coarsekit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double shell(const MetricSpace& s) { return 1e-9 + s.tolerance(); }

double last_coord(const MetricSpace& s, PointId p) {
  const auto c = s.coords(p);
  return c.empty() ? 0.0 : c.back();
}

void enumerate_lattice(std::size_t n, int radius, std::vector<int>& cur, std::size_t pos,
                       int budget, std::vector<GroupElement>& out) {
  if (pos == n) {
    out.push_back(GroupElement{cur});
    return;
  }
  for (int v = -budget; v <= budget; ++v) {
    cur[pos] = v;
    enumerate_lattice(n, radius, cur, pos + 1, budget - std::abs(v), out);
  }
  cur[pos] = 0;
}

int word_length(const GroupElement& g, GroupAction::Kind kind) {
  if (kind == GroupAction::Kind::finite) return static_cast<int>(g.coords.size());
  int s = 0;
  for (int c : g.coords) s += std::abs(c);
  return s;
}

std::vector<std::vector<PointId>> fibres_of(const CoarseMap& f) {
  std::vector<std::vector<PointId>> fib(f.target->size());
  for (std::size_t x = 0; x < f.assignment.size(); ++x) fib[f.assignment[x].index].push_back(PointId{x});
  return fib;
}

}  // namespace

bool GroupElement::is_identity() const {
  return std::all_of(coords.begin(), coords.end(), [](int c) { return c == 0; }) ||
         coords.empty();
}

std::string GroupElement::str() const {
  std::string s = "(";
  for (std::size_t i = 0; i < coords.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(coords[i]);
  }
  return s + ")";
}

// ---------------------------------------------------------------------------
// GroupAction

GroupAction GroupAction::lattice(SpacePtr space, std::vector<std::vector<double>> translations) {
  if (translations.empty()) throw InputError("lattice action needs at least one generator");
  for (const auto& v : translations)
    if (v.empty() || v.size() > space->coord_dim())
      throw InputError("translation vector exceeds the space's coordinate dimension");
  GroupAction a(Kind::lattice, std::move(space));
  a.translations_ = std::move(translations);
  return a;
}

GroupAction GroupAction::finite(SpacePtr space, std::vector<std::vector<std::size_t>> permutations) {
  const std::size_t n = space->size();
  for (const auto& p : permutations) {
    if (p.size() != n) throw InputError("permutation size must equal the point count");
    std::vector<bool> seen(n, false);
    for (auto v : p) {
      if (v >= n || seen[v]) throw InputError("generator is not a bijection");
      seen[v] = true;
    }
  }
  GroupAction a(Kind::finite, std::move(space));
  a.generators_ = std::move(permutations);
  std::vector<std::size_t> id(n);
  std::iota(id.begin(), id.end(), 0);
  a.perms_.push_back(id);
  a.words_.push_back(GroupElement{});
  a.perm_index_.emplace(id, 0);
  for (std::size_t head = 0; head < a.perms_.size(); ++head) {
    for (std::size_t gi = 0; gi < a.generators_.size(); ++gi) {
      std::vector<std::size_t> next(n);
      for (std::size_t x = 0; x < n; ++x) next[x] = a.generators_[gi][a.perms_[head][x]];
      if (a.perm_index_.count(next)) continue;
      GroupElement w{{static_cast<int>(gi)}};
      const auto& tail = a.words_[head].coords;
      w.coords.insert(w.coords.end(), tail.begin(), tail.end());
      a.perm_index_.emplace(next, a.perms_.size());
      a.perms_.push_back(std::move(next));
      a.words_.push_back(std::move(w));
      if (a.perms_.size() > 100000) throw InputError("finite group too large to enumerate");
    }
  }
  return a;
}

GroupAction GroupAction::trivial(SpacePtr space) { return finite(std::move(space), {}); }

std::size_t GroupAction::generator_count() const {
  return kind_ == Kind::lattice ? translations_.size() : generators_.size();
}

GroupElement GroupAction::identity() const {
  if (kind_ == Kind::lattice) return GroupElement{std::vector<int>(translations_.size(), 0)};
  return GroupElement{};
}

GroupElement GroupAction::generator(std::size_t i) const {
  if (i >= generator_count()) throw InputError("generator index out of range");
  if (kind_ == Kind::lattice) {
    GroupElement g = identity();
    g.coords[i] = 1;
    return g;
  }
  return words_[perm_index_.at(generators_[i])];
}

GroupElement GroupAction::compose(const GroupElement& a, const GroupElement& b) const {
  if (kind_ == Kind::lattice) {
    GroupElement g = identity();
    for (std::size_t i = 0; i < g.coords.size(); ++i) g.coords[i] = a.coords.at(i) + b.coords.at(i);
    return g;
  }
  auto find = [&](const GroupElement& e) -> const std::vector<std::size_t>& {
    auto it = std::find(words_.begin(), words_.end(), e);
    if (it == words_.end()) throw InputError("unknown group element " + e.str());
    return perms_[static_cast<std::size_t>(it - words_.begin())];
  };
  const auto& pa = find(a);
  const auto& pb = find(b);
  std::vector<std::size_t> p(pa.size());
  for (std::size_t x = 0; x < p.size(); ++x) p[x] = pa[pb[x]];
  return words_[perm_index_.at(p)];
}

GroupElement GroupAction::inverse(const GroupElement& a) const {
  if (kind_ == Kind::lattice) {
    GroupElement g = a;
    for (auto& c : g.coords) c = -c;
    return g;
  }
  auto it = std::find(words_.begin(), words_.end(), a);
  if (it == words_.end()) throw InputError("unknown group element " + a.str());
  const auto& p = perms_[static_cast<std::size_t>(it - words_.begin())];
  std::vector<std::size_t> inv(p.size());
  for (std::size_t x = 0; x < p.size(); ++x) inv[p[x]] = x;
  return words_[perm_index_.at(inv)];
}

std::vector<GroupElement> GroupAction::elements(int word_radius) const {
  std::vector<GroupElement> out;
  if (kind_ == Kind::lattice) {
    std::vector<int> cur(translations_.size(), 0);
    enumerate_lattice(translations_.size(), word_radius, cur, 0, word_radius, out);
  } else {
    for (const auto& w : words_)
      if (static_cast<int>(w.coords.size()) <= word_radius) out.push_back(w);
  }
  std::stable_sort(out.begin(), out.end(), [&](const GroupElement& a, const GroupElement& b) {
    const int la = word_length(a, kind_), lb = word_length(b, kind_);
    if (la != lb) return la < lb;
    return a < b;
  });
  return out;
}

std::optional<PointId> GroupAction::apply(const GroupElement& g, PointId x) const {
  space_->check(x);
  if (kind_ == Kind::finite) {
    auto it = std::find(words_.begin(), words_.end(), g);
    if (it == words_.end()) throw InputError("unknown group element " + g.str());
    return PointId{perms_[static_cast<std::size_t>(it - words_.begin())][x.index]};
  }
  if (g.coords.size() != translations_.size()) throw InputError("lattice element has wrong rank");
  if (g.is_identity()) return x;
  const auto c = space_->coords(x);
  std::vector<double> moved(c.begin(), c.end());
  for (std::size_t i = 0; i < translations_.size(); ++i)
    for (std::size_t k = 0; k < translations_[i].size(); ++k)
      moved[k] += g.coords[i] * translations_[i][k];
  return space_->find(moved);
}

std::vector<bool> GroupAction::interior_mask(int word_radius) const {
  const auto els = elements(word_radius);
  std::vector<bool> mask(space_->size(), true);
  for (std::size_t x = 0; x < mask.size(); ++x)
    for (const auto& g : els)
      if (!apply(g, PointId{x})) {
        mask[x] = false;
        break;
      }
  return mask;
}

Certification verify_isometries(const GroupAction& action, const ScanOptions& opts) {
  const MetricSpace& s = *action.space();
  const std::size_t n = s.size();
  const unsigned threads = resolve_threads(opts.threads);
  const double tol = s.tolerance();
  Certification cert;
  cert.verdict = Verdict::certified;
  std::size_t checked = 0;
  for (std::size_t gi = 0; gi < action.generator_count(); ++gi) {
    const GroupElement g = action.generator(gi);
    std::vector<std::optional<PointId>> img(n);
    for (std::size_t x = 0; x < n; ++x) img[x] = action.apply(g, PointId{x});
    std::vector<std::optional<std::pair<PointId, PointId>>> bad(std::max(1u, threads));
    std::vector<std::size_t> counts(std::max(1u, threads), 0);
    parallel_for(n, threads, [&](std::size_t lo, std::size_t hi, unsigned w) {
      for (std::size_t x = lo; x < hi && !bad[w]; ++x) {
        if (!img[x]) continue;
        const auto rx = s.distances_from(PointId{x});
        const auto rg = s.distances_from(*img[x]);
        for (std::size_t y = 0; y < n; ++y) {
          if (!img[y]) continue;
          ++counts[w];
          const double a = rx[y], b = rg[img[y]->index];
          if (std::abs(a - b) > tol * std::max(1.0, a)) {
            bad[w] = std::make_pair(PointId{x}, PointId{y});
            break;
          }
        }
      }
    });
    for (auto c : counts) checked += c;
    for (const auto& b : bad)
      if (b && cert.verdict == Verdict::certified) {
        cert.verdict = Verdict::refuted;
        cert.witness = {b->first, b->second};
        cert.witness_note = "generator " + std::to_string(gi) + " changes this pair's distance";
      }
  }
  cert.param("pairs_checked", static_cast<double>(checked));
  cert.param("tolerance", tol);
  return cert;
}

// ---------------------------------------------------------------------------
// Quotients

QuotientSpace quotient_space(const GroupAction& action, int orbit_horizon, unsigned threads_req) {
  const MetricSpace& s = *action.space();
  const std::size_t n = s.size();
  std::vector<GroupElement> moves;
  for (std::size_t i = 0; i < action.generator_count(); ++i) {
    moves.push_back(action.generator(i));
    moves.push_back(action.inverse(action.generator(i)));
  }
  QuotientSpace qs;
  qs.class_of.assign(n, std::numeric_limits<std::size_t>::max());
  for (std::size_t start = 0; start < n; ++start) {
    if (qs.class_of[start] != std::numeric_limits<std::size_t>::max()) continue;
    const std::size_t cls = qs.classes.size();
    qs.classes.emplace_back();
    std::deque<std::pair<std::size_t, int>> queue{{start, 0}};
    qs.class_of[start] = cls;
    while (!queue.empty()) {
      auto [x, depth] = queue.front();
      queue.pop_front();
      qs.classes[cls].push_back(PointId{x});
      for (const auto& g : moves) {
        auto y = action.apply(g, PointId{x});
        if (!y || qs.class_of[y->index] != std::numeric_limits<std::size_t>::max()) continue;
        if (depth + 1 > orbit_horizon)
          throw RefutedError("orbit of point " + std::to_string(start) +
                             " does not close within horizon " + std::to_string(orbit_horizon) +
                             "; escaping point " + std::to_string(y->index));
        qs.class_of[y->index] = cls;
        queue.emplace_back(y->index, depth + 1);
      }
    }
    std::sort(qs.classes[cls].begin(), qs.classes[cls].end());
  }

  const std::size_t m = qs.classes.size();
  const unsigned threads = resolve_threads(threads_req);
  std::vector<std::vector<double>> partial(std::max(1u, threads), std::vector<double>(m * m, kInf));
  parallel_for(n, threads, [&](std::size_t lo, std::size_t hi, unsigned w) {
    auto& mat = partial[w];
    for (std::size_t x = lo; x < hi; ++x) {
      const auto row = s.distances_from(PointId{x});
      const std::size_t cx = qs.class_of[x];
      for (std::size_t y = 0; y < n; ++y) {
        double& cell = mat[cx * m + qs.class_of[y]];
        cell = std::min(cell, row[y]);
      }
    }
  });
  std::vector<double> mat(m * m, kInf);
  for (const auto& p : partial)
    for (std::size_t i = 0; i < mat.size(); ++i) mat[i] = std::min(mat[i], p[i]);
  for (std::size_t a = 0; a < m; ++a) {
    mat[a * m + a] = 0.0;
    for (std::size_t b = a + 1; b < m; ++b) {
      const double v = std::min(mat[a * m + b], mat[b * m + a]);
      mat[a * m + b] = mat[b * m + a] = v;
    }
  }
  std::vector<double> coords;
  const std::size_t dim = s.coord_dim();
  for (const auto& c : qs.classes) {
    const auto pc = s.coords(c.front());
    coords.insert(coords.end(), pc.begin(), pc.end());
  }
  qs.space = build_matrix_space(SpaceKind::quotient, m, std::move(mat),
                                PointId{qs.class_of[s.basepoint().index]}, dim, std::move(coords));
  qs.q = CoarseMap{action.space(), qs.space, {}, std::nullopt};
  for (std::size_t x = 0; x < n; ++x) qs.q.assignment.push_back(PointId{qs.class_of[x]});
  return qs;
}

Displacement min_displacement(const GroupAction& action, int word_radius) {
  const MetricSpace& s = *action.space();
  auto els = action.elements(word_radius);
  els.erase(els.begin());  // identity
  Displacement out;
  out.value = kInf;
  out.element = action.identity();
  for (std::size_t x = 0; x < s.size(); ++x) {
    std::vector<std::pair<const GroupElement*, PointId>> images;
    for (const auto& g : els)
      if (auto y = action.apply(g, PointId{x})) images.emplace_back(&g, *y);
    if (images.empty()) continue;
    bool fixed = false;
    const auto row = s.distances_from(PointId{x});
    for (const auto& [g, y] : images) {
      const double d = y == PointId{x} ? 0.0 : row[y.index];
      if (d == 0.0) fixed = true;
      if (d < out.value) {
        out.value = d;
        out.point = PointId{x};
        out.element = *g;
      }
    }
    if (fixed) out.fixed_points.push_back(PointId{x});
  }
  if (out.value == kInf) out.value = 0.0;
  return out;
}

DiscontinuityCertificate certify_uniform_coarse_discontinuity(const GroupAction& action, double R,
                                                              int word_radius) {
  if (!(R > 0.0)) throw InputError("R must be positive");
  const MetricSpace& s = *action.space();
  const std::size_t n = s.size();
  const auto all = action.elements(word_radius);
  const auto base_row = s.distances_from(s.basepoint());
  const double ecc = *std::max_element(base_row.begin(), base_row.end());

  DiscontinuityCertificate out;
  out.R = R;
  out.word_radius = word_radius;
  double radius = -1.0;
  std::optional<PointId> far;
  std::optional<GroupElement> far_g;
  std::vector<std::vector<std::pair<PointId, GroupElement>>> images(n);
  for (std::size_t x = 0; x < n; ++x)
    for (const auto& g : all)
      if (auto y = action.apply(g, PointId{x})) images[x].emplace_back(*y, g);

  for (std::size_t x = 0; x < n; ++x) {
    std::optional<GroupElement> mover;
    std::vector<double> row;
    for (const auto& [y, g] : images[x]) {
      if (g.is_identity()) continue;
      if (row.empty()) row = s.distances_from(PointId{x});
      if (row[y.index] <= R) {
        mover = g;
        break;
      }
    }
    if (!mover) continue;
    ++out.bad_points;
    out.max_bad_height = std::max(out.max_bad_height, last_coord(s, PointId{x}));
    double nearest = kInf;
    for (const auto& [y, g] : images[x]) nearest = std::min(nearest, base_row[y.index]);
    if (nearest > radius) {
      radius = nearest;
      far = PointId{x};
      far_g = mover;
    }
  }
  out.cert.param("R", R);
  out.cert.param("word_radius", word_radius);
  out.cert.param("bad_points", static_cast<double>(out.bad_points));
  out.cert.param("max_bad_height", out.max_bad_height);
  if (!far) {
    out.K = BoundedSet::none(s);
    out.cert.verdict = Verdict::certified;
    out.cert.note = "no non-identity element moves any point by <= R";
    return out;
  }
  out.K = BoundedSet::around(s, s.basepoint(), radius);
  out.cert.param("K_radius", radius);
  if (radius >= ecc - shell(s)) {
    out.cert.verdict = Verdict::refuted;
    out.cert.witness = {*far};
    out.cert.witness_note = "moved by <= R by element " + far_g->str() + " at the model's outer shell";
  } else {
    out.cert.verdict = Verdict::certified;
  }
  return out;
}

ScatterCertificate certify_scattered_fibres(const CoarseMap& q, double R) {
  if (!(R > 0.0)) throw InputError("R must be positive");
  q.validate();
  const MetricSpace& src = *q.source;
  const MetricSpace& tgt = *q.target;
  const auto fib = fibres_of(q);
  const auto trow = tgt.distances_from(tgt.basepoint());
  const double ecc = *std::max_element(trow.begin(), trow.end());

  ScatterCertificate out;
  out.R = R;
  double radius = -1.0;
  std::optional<std::pair<PointId, PointId>> wit;
  double wit_d = kInf;
  for (std::size_t y = 0; y < fib.size(); ++y) {
    const auto& f = fib[y];
    if (f.size() < 2) continue;
    for (std::size_t i = 0; i < f.size(); ++i) {
      const auto row = src.distances_from(f[i]);
      for (std::size_t j = i + 1; j < f.size(); ++j) {
        const double d = row[f[j].index];
        if (d > R) continue;
        out.max_bad_height = std::max(out.max_bad_height, last_coord(src, f[i]));
        if (trow[y] > radius || (trow[y] == radius && d < wit_d)) {
          radius = trow[y];
          wit = std::make_pair(f[i], f[j]);
          wit_d = d;
        }
      }
    }
  }
  out.cert.param("R", R);
  if (!wit) {
    out.K = BoundedSet::none(tgt);
    out.cert.verdict = Verdict::certified;
    out.cert.note = "no distinct fibre-mates within R";
    return out;
  }
  out.K = BoundedSet::around(tgt, tgt.basepoint(), radius);
  out.cert.param("K_radius", radius);
  out.cert.param("max_bad_height", out.max_bad_height);
  if (radius >= ecc - shell(tgt)) {
    out.cert.verdict = Verdict::refuted;
    out.cert.witness = {wit->first, wit->second};
    out.cert.witness_note = "closest fibre-mates within R at the target's outer shell";
  } else {
    out.cert.verdict = Verdict::certified;
  }
  return out;
}

std::optional<PointId> nearest_fibre_point(const CoarseMap& f, PointId x, PointId y) {
  std::optional<PointId> best;
  double bd = kInf;
  for (std::size_t i = 0; i < f.assignment.size(); ++i) {
    if (f.assignment[i] != y) continue;
    const double d = f.source->distance(x, PointId{i});
    if (d < bd) {
      bd = d;
      best = PointId{i};
    }
  }
  return best;
}

SoftnessTable certify_soft_quotient(const CoarseMap& f, const std::vector<double>& R_grid,
                                    const std::vector<bool>& mask, unsigned threads_req) {
  if (R_grid.empty()) throw InputError("softness needs at least one radius");
  if (!std::is_sorted(R_grid.begin(), R_grid.end())) throw InputError("R grid must be sorted");
  f.validate();
  const MetricSpace& src = *f.source;
  const MetricSpace& tgt = *f.target;
  const auto fib = fibres_of(f);
  for (std::size_t y = 0; y < fib.size(); ++y)
    if (fib[y].empty())
      throw RefutedError("map is not surjective: target point " + std::to_string(y) +
                         " has an empty fibre");
  const std::size_t n = src.size();
  const double rmax = R_grid.back();
  const unsigned threads = resolve_threads(threads_req);
  const std::size_t nr = R_grid.size();
  std::vector<std::vector<SoftEntry>> acc(std::max(1u, threads), std::vector<SoftEntry>(nr));
  for (auto& a : acc)
    for (std::size_t i = 0; i < nr; ++i) a[i].R = R_grid[i], a[i].S = -1.0;

  parallel_for(n, threads, [&](std::size_t lo, std::size_t hi, unsigned w) {
    for (std::size_t x = lo; x < hi; ++x) {
      if (!mask.empty() && !mask[x]) continue;
      const auto row = src.distances_from(PointId{x});
      const auto trow = tgt.distances_from(f.assignment[x]);
      for (std::size_t y = 0; y < fib.size(); ++y) {
        if (trow[y] > rmax) continue;
        double best = kInf;
        PointId arg{};
        for (const auto& xp : fib[y])
          if (row[xp.index] < best) {
            best = row[xp.index];
            arg = xp;
          }
        for (std::size_t i = 0; i < nr; ++i) {
          if (trow[y] > R_grid[i]) continue;
          auto& e = acc[w][i];
          if (best > e.S) e = SoftEntry{R_grid[i], best, PointId{x}, PointId{y}, arg};
        }
      }
    }
  });
  SoftnessTable table;
  for (std::size_t i = 0; i < nr; ++i) {
    SoftEntry e = acc[0][i];
    for (std::size_t w = 1; w < acc.size(); ++w)
      if (acc[w][i].S > e.S) e = acc[w][i];  // strict: earliest worker (smallest x) wins ties
    if (e.S < 0.0) e.S = 0.0;
    table.rows.push_back(e);
  }
  for (std::size_t x = 0; x < n; ++x) {
    if (mask.empty() || mask[x]) ++table.scanned_points;
    else ++table.excluded_points;
  }
  return table;
}

double LiftCertificate::softness_at(double R) const {
  for (const auto& e : softness)
    if (e.R >= R - 1e-12) return e.S;
  throw InputError("lift certificate has no softness entry covering R = " + std::to_string(R));
}

const ScatterCertificate& LiftCertificate::scatter_at(double R) const {
  for (const auto& e : scatter)
    if (e.R >= R - 1e-12) return e;
  throw InputError("lift certificate has no scattered-fibre entry covering R = " +
                   std::to_string(R));
}

LiftCertificate build_lift_certificate(const CoarseMap& q, const std::vector<double>& soft_radii,
                                       const std::vector<double>& scatter_radii,
                                       const std::vector<bool>& mask, unsigned threads) {
  LiftCertificate c;
  auto sorted_soft = soft_radii;
  std::sort(sorted_soft.begin(), sorted_soft.end());
  auto table = certify_soft_quotient(q, sorted_soft, mask, threads);
  c.softness = table.rows;
  auto sorted_scatter = scatter_radii;
  std::sort(sorted_scatter.begin(), sorted_scatter.end());
  for (double r : sorted_scatter) c.scatter.push_back(certify_scattered_fibres(q, r));
  c.provenance.emplace_back("scanned_points", static_cast<double>(table.scanned_points));
  c.provenance.emplace_back("excluded_boundary_points", static_cast<double>(table.excluded_points));
  return c;
}

std::vector<PointId> saturate(const GroupAction& action, const BoundedSet& K, int word_radius) {
  std::vector<bool> in(action.space()->size(), false);
  if (!K.empty) {
    const auto els = action.elements(word_radius);
    for (const auto& k : ball(*action.space(), K.center, K.radius))
      for (const auto& g : els)
        if (auto y = action.apply(g, k)) in[y->index] = true;
  }
  std::vector<PointId> out;
  for (std::size_t i = 0; i < in.size(); ++i)
    if (in[i]) out.push_back(PointId{i});
  return out;
}

std::vector<PointId> preimage_of_image(const CoarseMap& q, const BoundedSet& K) {
  std::vector<bool> hit(q.target->size(), false);
  if (!K.empty)
    for (const auto& k : ball(*q.source, K.center, K.radius)) hit[q(k).index] = true;
  std::vector<PointId> out;
  for (std::size_t x = 0; x < q.assignment.size(); ++x)
    if (hit[q.assignment[x].index]) out.push_back(PointId{x});
  return out;
}

double saturation_radius(const GroupAction& action, const BoundedSet& K, int word_radius) {
  const auto row = action.space()->distances_from(action.space()->basepoint());
  double r = 0.0;
  for (const auto& p : saturate(action, K, word_radius)) r = std::max(r, row[p.index]);
  return r;
}

ConeCovering make_cone_covering(const ManifoldModel& compact, double cover_half_width,
                                double t_max, double t_step) {
  std::vector<std::vector<double>> translations;
  std::optional<ManifoldModel> cover_model;
  switch (compact.kind()) {
    case ManifoldModel::Kind::circle:
      cover_model = ManifoldModel::line(cover_half_width, compact.mesh());
      translations = {{compact.periods()[0]}};
      break;
    case ManifoldModel::Kind::flat_torus:
      cover_model = ManifoldModel::plane(cover_half_width, compact.mesh());
      translations = {{compact.periods()[0], 0.0}, {0.0, compact.periods()[1]}};
      break;
    default:
      throw InputError("cone covering needs a compact (circle or torus) model");
  }
  ConePtr base = metric_cone(compact, t_max, t_step);
  ConePtr cover = metric_cone(*cover_model, t_max, t_step);
  CoarseMap pi{cover->space(), base->space(), {}, std::nullopt};
  pi.assignment.reserve(cover->space()->size());
  for (std::size_t v = 0; v < cover->space()->size(); ++v) {
    auto [m, k] = cover->split(PointId{v});
    const auto mesh = compact.find_mesh(cover_model->mesh_point(m));
    if (!mesh) throw InputError("cover mesh does not project onto the compact mesh");
    pi.assignment.push_back(base->vertex(*mesh, k));
  }
  GroupAction action = GroupAction::lattice(cover->space(), translations);
  auto interior = action.interior_mask(1);
  return ConeCovering{cover, base, std::move(pi), std::move(action), std::move(interior)};
}

}  // namespace coarsekit
