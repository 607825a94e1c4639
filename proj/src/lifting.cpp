// Copyright 2026 The coarsekit Authors
// SPDX-License-Identifier: Apache-2.0

#include "coarsekit/lifting.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "coarsekit/errors.hpp"
#include "coarsekit/parallel.hpp"

namespace coarsekit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double slack(double v) { return 1e-9 * (1.0 + std::abs(v)); }

std::vector<std::vector<PointId>> fibres_of(const CoarseMap& f) {
  std::vector<std::vector<PointId>> fib(f.target->size());
  for (std::size_t x = 0; x < f.assignment.size(); ++x)
    fib[f.assignment[x].index].push_back(PointId{x});
  return fib;
}

/// Distance from the start of `near` (sorted by id) to `p`, or +inf.
double lookup(const std::vector<std::pair<PointId, double>>& near, PointId p) {
  auto it = std::lower_bound(near.begin(), near.end(), p,
                             [](const auto& e, PointId q) { return e.first < q; });
  return it != near.end() && it->first == p ? it->second : kInf;
}

/// max d(f a, f b) over source pairs with d(a, b) <= radius.
double local_rho(const CoarseMap& f, double radius, unsigned threads_req = 0) {
  const MetricSpace& src = *f.source;
  const MetricSpace& tgt = *f.target;
  const unsigned threads = resolve_threads(threads_req);
  std::vector<double> acc(std::max(1u, threads), 0.0);
  parallel_for(src.size(), threads, [&](std::size_t lo, std::size_t hi, unsigned w) {
    for (std::size_t a = lo; a < hi; ++a) {
      for (const auto& [b, d] : src.distances_within(PointId{a}, radius)) {
        if (b.index <= a) continue;
        const PointId fa = f.assignment[a], fb = f.assignment[b.index];
        if (fa == fb) continue;
        acc[w] = std::max(acc[w], tgt.distance(fa, fb));
      }
    }
  });
  return *std::max_element(acc.begin(), acc.end());
}

void require_same_space(const SpacePtr& a, const SpacePtr& b, const char* what) {
  if (a.get() != b.get()) throw InputError(std::string("space mismatch: ") + what);
}

void check_lifts(const CoarseMap& pi, const Homotopy& f, const CoarseMap& f0, const Homotopy& g,
                 const char* name) {
  if (g.map.assignment.size() != f.map.assignment.size())
    throw InputError(std::string(name) + " has a different cylinder than f");
  for (std::size_t p = 0; p < g.map.assignment.size(); ++p)
    if (pi(g.map.assignment[p]) != f.map.assignment[p])
      throw InputError(std::string(name) + " does not lift f at cylinder point " +
                       std::to_string(p));
  const PCylinder& cyl = *f.cylinder;
  for (std::size_t x = 0; x < cyl.base()->size(); ++x)
    if (g.map(cyl.i0(PointId{x})) != f0(PointId{x}))
      throw InputError(std::string(name) + " does not start at f0 over base point " +
                       std::to_string(x));
}

}  // namespace

// ---------------------------------------------------------------------------
// Maps

CoarseMap Homotopy::start() const {
  CoarseMap m{cylinder->base(), map.target, {}, std::nullopt};
  for (std::size_t x = 0; x < cylinder->base()->size(); ++x)
    m.assignment.push_back(map(cylinder->i0(PointId{x})));
  return m;
}

CoarseMap Homotopy::end() const {
  CoarseMap m{cylinder->base(), map.target, {}, std::nullopt};
  for (std::size_t x = 0; x < cylinder->base()->size(); ++x)
    m.assignment.push_back(map(cylinder->i1(PointId{x})));
  return m;
}

void Homotopy::validate() const {
  if (!cylinder) throw InputError("homotopy has no cylinder");
  require_same_space(map.source, cylinder->space(), "homotopy source must be its cylinder");
  map.validate();
}

void RayMap::validate() const {
  if (!domain || !target) throw InputError("ray map needs a domain and a target");
  if (domain->coord_dim() != 1) throw InputError("ray domain must be a 1-D grid");
  as_map().validate();
}

RayMap standard_cone_ray(const ConeSpace& cone, const SpacePtr& ray_domain) {
  if (ray_domain->size() > cone.levels())
    throw InputError("ray is longer than the cone has levels");
  RayMap r{ray_domain, cone.space(), {}, std::nullopt};
  for (std::size_t i = 0; i < ray_domain->size(); ++i)
    r.assignment.push_back(cone.vertex(cone.model().mesh_basepoint(), i));
  return r;
}

std::optional<RayMap> act_on_ray(const GroupAction& action, const GroupElement& g, const RayMap& b) {
  require_same_space(b.target, action.space(), "ray target must carry the action");
  RayMap out{b.domain, b.target, {}, std::nullopt};
  out.assignment.reserve(b.size());
  for (const auto& p : b.assignment) {
    auto q = action.apply(g, p);
    if (!q) return std::nullopt;
    out.assignment.push_back(*q);
  }
  return out;
}

void LoopMap::validate() const {
  if (!domain) throw InputError("loop has no domain");
  require_same_space(map.source, domain->space(), "loop source must be its cone interval");
  map.validate();
  base.validate();
  if (base.size() != domain->columns()) throw InputError("loop base ray has the wrong length");
  require_same_space(base.target, map.target, "loop and base ray targets differ");
  for (std::size_t i = 0; i < base.size(); ++i) {
    if (map(domain->i0(i)) != base.assignment[i] || map(domain->i1(i)) != base.assignment[i])
      throw InputError("loop is not based at its ray at column " + std::to_string(i));
  }
}

Homotopy LoopMap::as_homotopy() const { return Homotopy{domain->cylinder(), map}; }

// ---------------------------------------------------------------------------
// Lifting

StepBound lift_step_bound(const LiftCertificate& cert, const Homotopy& f) {
  StepBound b;
  b.delta = f.cylinder->t_step();
  b.rho = f.map.profile ? f.map.profile->at(b.delta) : local_rho(f.map, b.delta + slack(b.delta));
  b.T = cert.softness_at(b.rho);
  return b;
}

Homotopy lift_homotopy(const CoarseMap& pi, const LiftCertificate& cert, const Homotopy& f,
                       const CoarseMap& f0, const LiftOptions& opts) {
  f.validate();
  pi.validate();
  f0.validate();
  require_same_space(f.map.target, pi.target, "f must map into the target of pi");
  require_same_space(f0.target, pi.source, "f0 must map into the source of pi");
  const PCylinder& cyl = *f.cylinder;
  if (f0.assignment.size() != cyl.base()->size())
    throw InputError("f0 must be defined on the cylinder base");
  for (std::size_t x = 0; x < cyl.base()->size(); ++x)
    if (pi(f0(PointId{x})) != f.map(cyl.i0(PointId{x})))
      throw InputError("pi(f0) differs from f(., 0) at base point " + std::to_string(x));

  const auto fib = fibres_of(pi);
  const StepBound sb = lift_step_bound(cert, f);
  const double reach = sb.T + slack(sb.T);
  const MetricSpace& cover = *pi.source;

  Homotopy out{f.cylinder, CoarseMap{cyl.space(), pi.source, {}, std::nullopt}};
  out.map.assignment.assign(cyl.space()->size(), PointId{});
  const unsigned threads = resolve_threads(opts.threads);
  parallel_for(cyl.base()->size(), threads, [&](std::size_t lo, std::size_t hi, unsigned) {
    for (std::size_t x = lo; x < hi; ++x) {
      PointId cur = f0(PointId{x});
      out.map.assignment[cyl.i0(PointId{x}).index] = cur;
      for (std::size_t k = 1; k < cyl.column_size(PointId{x}); ++k) {
        const PointId p = cyl.at(PointId{x}, k);
        const auto& candidates = fib[f.map(p).index];
        const auto near = cover.distances_within(cur, reach);
        std::optional<PointId> best;
        double bd = kInf;
        for (const auto& c : candidates) {
          const double d = lookup(near, c);
          if (d == kInf) continue;
          const bool better = d < bd || (d == bd && opts.tie_break == TieBreak::largest_id);
          if (better) {
            bd = d;
            best = c;
          }
        }
        if (!best)
          throw StuckLiftError("no point of the next fibre within T = " + std::to_string(sb.T) +
                                   " over base point " + std::to_string(x) + " at t = " +
                                   std::to_string(cyl.t(p)),
                               x, cyl.t(p));
        cur = *best;
        out.map.assignment[p.index] = cur;
      }
    }
  });
  return out;
}

LiftBounds lift_bounds(const CoarseMap& pi, const LiftCertificate& cert, const Homotopy& f,
                       const CoarseMap& f0, double pair_radius) {
  LiftBounds b;
  b.step = lift_step_bound(cert, f);
  b.pair_radius = pair_radius;
  const double rho_pair = local_rho(f.map, pair_radius + slack(pair_radius));
  const double rho_init = local_rho(f0, pair_radius + slack(pair_radius));
  b.S = std::max(cert.softness_at(rho_pair), rho_init);
  b.scatter_radius = 2.0 * b.S + 2.0 * b.step.T;
  ScatterCertificate sc;
  bool covered = false;
  for (const auto& e : cert.scatter)
    if (e.R >= b.scatter_radius - 1e-12) {
      sc = e;
      covered = true;
      break;
    }
  if (!covered) sc = certify_scattered_fibres(pi, b.scatter_radius);
  b.K = sc.K;

  const PCylinder& cyl = *f.cylinder;
  const std::size_t nx = cyl.base()->size();
  b.exceptional_column.assign(nx, false);
  for (std::size_t x = 0; x < nx; ++x)
    for (std::size_t k = 0; k < cyl.column_size(PointId{x}); ++k)
      if (b.K.contains(f.map(cyl.at(PointId{x}, k)))) {
        b.exceptional_column[x] = true;
        break;
      }
  const auto row = cyl.space()->distances_from(cyl.space()->basepoint());
  for (std::size_t x = 0; x < nx; ++x) {
    if (!b.exceptional_column[x]) continue;
    for (std::size_t k = 0; k < cyl.column_size(PointId{x}); ++k)
      b.exceptional_radius = std::max(b.exceptional_radius, row[cyl.at(PointId{x}, k).index]);
  }
  return b;
}

Certification verify_lift(const CoarseMap& pi, const Homotopy& f, const Homotopy& f_tilde,
                          const CoarseMap& f0, const LiftBounds& bounds) {
  const PCylinder& cyl = *f.cylinder;
  if (f_tilde.map.assignment.size() != f.map.assignment.size() ||
      f0.assignment.size() != cyl.base()->size())
    throw InputError("lift, homotopy and initial map have mismatched shapes");
  const MetricSpace& cover = *pi.source;
  Certification cert;
  cert.param("T", bounds.step.T);
  cert.param("S", bounds.S);
  cert.param("pair_radius", bounds.pair_radius);
  cert.param("K_radius", bounds.K.empty ? 0.0 : bounds.K.radius);
  cert.param("exceptional_columns",
             static_cast<double>(std::count(bounds.exceptional_column.begin(),
                                            bounds.exceptional_column.end(), true)));
  auto refute = [&](std::vector<PointId> w, std::string note) {
    cert.verdict = Verdict::refuted;
    cert.witness = std::move(w);
    cert.witness_note = std::move(note);
    return cert;
  };

  for (std::size_t p = 0; p < f.map.assignment.size(); ++p)
    if (f_tilde.map.assignment[p].index >= cover.size() ||
        pi(f_tilde.map.assignment[p]) != f.map.assignment[p])
      return refute({PointId{p}}, "lift does not commute with pi at this cylinder point");
  for (std::size_t x = 0; x < cyl.base()->size(); ++x)
    if (f_tilde.map(cyl.i0(PointId{x})) != f0(PointId{x}))
      return refute({cyl.i0(PointId{x})}, "lift differs from f0 at this initial point");

  const double s_reach = bounds.S + slack(bounds.S);
  const MetricSpace& base = *cyl.base();
  for (std::size_t x = 0; x < base.size(); ++x) {
    if (bounds.exceptional_column[x]) continue;
    const auto partners = base.distances_within(PointId{x}, bounds.pair_radius + slack(bounds.pair_radius));
    for (std::size_t k = 0; k < cyl.column_size(PointId{x}); ++k) {
      const PointId a = cyl.at(PointId{x}, k);
      std::optional<std::vector<std::pair<PointId, double>>> near;
      for (const auto& [xp, d] : partners) {
        if (xp.index <= x || bounds.exceptional_column[xp.index]) continue;
        if (k >= cyl.column_size(xp)) continue;
        const PointId b = cyl.at(xp, k);
        if (!near) near = cover.distances_within(f_tilde.map(a), s_reach);
        if (lookup(*near, f_tilde.map(b)) == kInf)
          return refute({a, b}, "same-level lift points farther apart than S outside K");
      }
    }
  }

  const double t_reach = bounds.step.T + slack(bounds.step.T);
  for (std::size_t x = 0; x < base.size(); ++x)
    for (std::size_t k = 1; k < cyl.column_size(PointId{x}); ++k) {
      const PointId a = cyl.at(PointId{x}, k - 1), b = cyl.at(PointId{x}, k);
      const auto fa = f_tilde.map(a), fb = f_tilde.map(b);
      if (fa == fb) continue;
      if (lookup(cover.distances_within(fa, t_reach), fb) == kInf)
        return refute({a, b}, "consecutive lift points farther apart than T");
    }
  cert.verdict = Verdict::certified;
  return cert;
}

UniquenessDefect uniqueness_defect(const CoarseMap& pi, const Homotopy& f, const CoarseMap& f0,
                                   const Homotopy& a, const Homotopy& b) {
  check_lifts(pi, f, f0, a, "first lift");
  check_lifts(pi, f, f0, b, "second lift");
  const MetricSpace& cyl = *f.cylinder->space();
  UniquenessDefect out;
  for (std::size_t p = 0; p < a.map.assignment.size(); ++p)
    if (a.map.assignment[p] != b.map.assignment[p]) out.disagreements.push_back(PointId{p});
  if (out.disagreements.empty()) {
    out.ball = BoundedSet::none(cyl);
    return out;
  }
  out.empty = false;
  const auto row = cyl.distances_from(cyl.basepoint());
  double r = 0.0;
  for (const auto& p : out.disagreements) r = std::max(r, row[p.index]);
  out.ball = BoundedSet::around(cyl, cyl.basepoint(), r);
  const double ecc = *std::max_element(row.begin(), row.end());
  out.reaches_boundary = r >= ecc - 1e-9 - cyl.tolerance();
  return out;
}

Equivalence lifts_equivalent(const CoarseMap& pi, const RayMap& b1, const RayMap& b2,
                             double horizon) {
  if (b1.size() != b2.size() || b1.size() == 0) throw InputError("rays have different lengths");
  require_same_space(b1.target, b2.target, "rays must share a target");
  require_same_space(b1.target, pi.source, "rays must lie in the source of pi");
  if (!(horizon >= 0.0) || horizon >= b1.t(b1.size() - 1))
    throw InputError("horizon must lie inside the ray's extent");
  double t0 = 0.0;
  for (std::size_t i = 0; i < b1.size(); ++i) {
    if (pi(b1.assignment[i]) != pi(b2.assignment[i]))
      throw InputError("rays lift different downstairs rays (t = " + std::to_string(b1.t(i)) + ")");
    if (b1.assignment[i] != b2.assignment[i]) t0 = b1.t(i);
  }
  return Equivalence{t0 <= horizon + 1e-12, t0, horizon};
}

RayMap lifting_correspondence(const CoarseMap& pi, const LiftCertificate& cert,
                              const LoopMap& alpha, const RayMap& b_prime,
                              const LiftOptions& opts) {
  alpha.validate();
  b_prime.validate();
  require_same_space(b_prime.target, pi.source, "b' must lie in the source of pi");
  require_same_space(alpha.map.target, pi.target, "loop must lie in the target of pi");
  if (b_prime.size() != alpha.base.size()) throw InputError("b' and the loop's ray differ in length");
  for (std::size_t i = 0; i < b_prime.size(); ++i)
    if (pi(b_prime.assignment[i]) != alpha.base.assignment[i])
      throw InputError("loop is not based at pi(b') at column " + std::to_string(i));
  const Homotopy f = alpha.as_homotopy();
  const CoarseMap f0{f.cylinder->base(), pi.source, b_prime.assignment, std::nullopt};
  const Homotopy lifted = lift_homotopy(pi, cert, f, f0, opts);
  RayMap phi{b_prime.domain, pi.source, {}, std::nullopt};
  for (std::size_t i = 0; i < b_prime.size(); ++i)
    phi.assignment.push_back(lifted.map(alpha.domain->i1(i)));
  return phi;
}

Classification classify_lift(const GroupAction& action, const CoarseMap& pi,
                             const RayMap& b_prime, const RayMap& b_dd, double horizon,
                             int word_radius) {
  std::vector<std::pair<GroupElement, double>> matches;
  std::size_t candidates = 0;
  double latest = kInf;
  for (const auto& g : action.elements(word_radius)) {
    const auto gb = act_on_ray(action, g, b_prime);
    if (!gb) continue;
    ++candidates;
    const auto eq = lifts_equivalent(pi, b_dd, *gb, horizon);
    if (eq.equivalent) matches.emplace_back(g, eq.t0);
    latest = std::min(latest, eq.t0);
  }
  if (matches.empty())
    throw RefutedError("no element of the word ball matches the lift up to horizon " +
                       std::to_string(horizon) + "; closest candidate disagrees until t = " +
                       std::to_string(latest));
  if (matches.size() > 1) {
    std::string list;
    for (const auto& [g, t0] : matches) list += " " + g.str();
    throw RefutedError("lift matches several elements up to horizon " + std::to_string(horizon) +
                       ":" + list);
  }
  return Classification{matches[0].first, matches[0].second, horizon, candidates};
}

SesReport verify_ses_instance(const GroupAction& action, const CoarseMap& pi,
                              const LiftCertificate& cert, const RayMap& b_prime,
                              const std::vector<LoopMap>& loops,
                              const std::vector<SesProduct>& products, double horizon,
                              int word_radius, const LiftOptions& opts) {
  SesReport report;
  report.horizon = horizon;
  for (const auto& loop : loops) {
    const RayMap phi = lifting_correspondence(pi, cert, loop, b_prime, opts);
    SesLoopResult r;
    r.label = loop.label;
    r.cls = classify_lift(action, pi, b_prime, phi, horizon, word_radius);
    r.closes_up = lifts_equivalent(pi, phi, b_prime, horizon).equivalent;
    if (r.cls.g.is_identity() && !r.closes_up) report.kernel_ok = false;
    report.loops.push_back(std::move(r));
  }
  for (const auto& p : products) {
    if (p.left >= loops.size() || p.right >= loops.size())
      throw InputError("product refers to an unknown loop");
    const RayMap phi = lifting_correspondence(pi, cert, p.loop, b_prime, opts);
    SesProductResult r;
    r.left = p.left;
    r.right = p.right;
    r.product_g = classify_lift(action, pi, b_prime, phi, horizon, word_radius).g;
    r.expected = action.compose(report.loops[p.left].cls.g, report.loops[p.right].cls.g);
    r.ok = r.product_g == r.expected;
    if (!r.ok) report.homomorphism_ok = false;
    if (r.product_g.is_identity() && !lifts_equivalent(pi, phi, b_prime, horizon).equivalent)
      report.kernel_ok = false;
    report.products.push_back(std::move(r));
  }
  return report;
}

std::string column_trace_csv(const Homotopy& f_tilde, PointId x) {
  const PCylinder& cyl = *f_tilde.cylinder;
  cyl.base()->check(x);
  const MetricSpace& tgt = *f_tilde.map.target;
  std::string out = "level,t,point";
  for (std::size_t c = 0; c < tgt.coord_dim(); ++c) out += ",c" + std::to_string(c);
  out += "\n";
  char buf[64];
  for (std::size_t k = 0; k < cyl.column_size(x); ++k) {
    const PointId p = cyl.at(x, k);
    const PointId q = f_tilde.map(p);
    std::snprintf(buf, sizeof buf, "%zu,%.12g,%zu", k, cyl.t(p), q.index);
    out += buf;
    for (double c : tgt.coords(q)) {
      std::snprintf(buf, sizeof buf, ",%.12g", c);
      out += buf;
    }
    out += "\n";
  }
  return out;
}

}  // namespace coarsekit
