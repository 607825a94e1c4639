// Copyright 2026 The coarsekit Authors
// SPDX-License-Identifier: Apache-2.0

#include "coarsekit/homotopy_lab.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <limits>
#include <random>

#include "coarsekit/errors.hpp"
#include "coarsekit/parallel.hpp"

namespace coarsekit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::size_t floor_index(double v) {
  const double f = std::floor(v + 1e-9);
  return f <= 0.0 ? 0 : static_cast<std::size_t>(f);
}

long long floor_div(long long a, long long b) {
  long long q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

long long positive_mod(long long a, long long n) { return ((a % n) + n) % n; }

PointId nearest_by_coords(const MetricSpace& s, const std::vector<double>& c) {
  PointId best{};
  double bd = kInf;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const auto pc = s.coords(PointId{i});
    double d = 0.0;
    for (std::size_t k = 0; k < c.size(); ++k) d += (pc[k] - c[k]) * (pc[k] - c[k]);
    if (d < bd) {
      bd = d;
      best = PointId{i};
    }
  }
  return best;
}

void require_loop_compat(const LoopMap& a, const LoopMap& b) {
  if (a.domain.get() != b.domain.get()) throw InputError("loops live on different cone intervals");
  if (a.map.target.get() != b.map.target.get()) throw InputError("loops have different targets");
  if (a.base.assignment != b.base.assignment) throw InputError("loops have different base rays");
}

}  // namespace

// ---------------------------------------------------------------------------
// Loops

LoopMap loop_from(const ConeIntervalPtr& domain, const RayMap& base, std::string label,
                  const std::function<PointId(std::size_t, std::size_t)>& rule) {
  LoopMap out{domain, CoarseMap{domain->space(), base.target, {}, std::nullopt}, base,
              std::move(label), 0.0};
  out.map.assignment.assign(domain->space()->size(), PointId{});
  for (std::size_t i = 0; i < domain->columns(); ++i)
    for (std::size_t k = 0; k <= i; ++k) out.map.assignment[domain->at(i, k).index] = rule(i, k);
  out.validate();
  return out;
}

LoopMap trivial_loop(const ConeIntervalPtr& domain, const RayMap& base) {
  return loop_from(domain, base, "trivial",
                   [&](std::size_t i, std::size_t) { return base.assignment.at(i); });
}

LoopMap winding_loop(const ConeIntervalPtr& domain, const ConeSpace& cone,
                     std::array<int, 2> winding) {
  const ManifoldModel& m = cone.model();
  if (m.hadamard()) throw InputError("winding loops need a circle or torus model");
  const RayMap base = standard_cone_ray(cone, domain->ray());
  const ModelPoint origin = m.mesh_point(m.mesh_basepoint());
  const int dim = m.dim();
  std::array<long long, 2> n{1, 1};
  for (int a = 0; a < dim; ++a) n[a] = std::llround(m.periods()[a] / m.mesh());
  std::string label = "winding(" + std::to_string(winding[0]);
  if (dim == 2) label += "," + std::to_string(winding[1]);
  label += ")";
  return loop_from(domain, base, label, [&](std::size_t i, std::size_t k) {
    ModelPoint y = origin;
    if (i > 0)
      for (int a = 0; a < dim; ++a) {
        const long long idx = positive_mod(
            floor_div(static_cast<long long>(winding[a]) * static_cast<long long>(k) * n[a],
                      static_cast<long long>(i)),
            n[a]);
        y[a] += static_cast<double>(idx) * m.mesh();
      }
    const auto mi = m.find_mesh(m.wrap(y));
    if (!mi) throw InputError("winding loop left the mesh");
    return cone.vertex(*mi, i);
  });
}

LoopMap concatenate(const LoopMap& alpha, const LoopMap& beta) {
  alpha.validate();
  beta.validate();
  require_loop_compat(alpha, beta);
  const ConeInterval& d = *alpha.domain;
  const MetricSpace& tgt = *alpha.map.target;
  double gap = 0.0;
  for (std::size_t i = 0; i < d.columns(); ++i)
    gap = std::max(gap, tgt.distance(alpha.map(d.i1(i)), beta.map(d.i0(i))));
  LoopMap out = loop_from(alpha.domain, alpha.base, "(" + alpha.label + "*" + beta.label + ")",
                          [&](std::size_t i, std::size_t k) {
                            if (2 * k <= i) return alpha.map(d.at(i, 2 * k));
                            return beta.map(d.at(i, 2 * k - i));
                          });
  out.seam_gap = gap;
  return out;
}

LoopMap reverse(const LoopMap& alpha) {
  alpha.validate();
  const ConeInterval& d = *alpha.domain;
  return loop_from(alpha.domain, alpha.base, "rev(" + alpha.label + ")",
                   [&](std::size_t i, std::size_t k) { return alpha.map(d.at(i, i - k)); });
}

// ---------------------------------------------------------------------------
// Straight-line homotopies

Homotopy straight_line_homotopy(const CoarseMap& f, const CoarseMap& g, double t_step,
                                const ConeSpace* cone) {
  if (!(t_step > 0.0 && t_step <= 1.0)) throw InputError("t_step must lie in (0, 1]");
  const MetricSpace& tgt = *f.target;
  if (cone && cone->space().get() != f.target.get())
    throw InputError("cone does not match the maps' target");
  if (!cone && tgt.coord_dim() == 0)
    throw InputError("target has neither a cone model nor coordinates to interpolate");
  const Closeness cl = closeness(f, g);
  auto cyl = p_cylinder(HeightFunction::constant(f.source, cl.value), t_step);
  Homotopy h{cyl, CoarseMap{cyl->space(), f.target, {}, std::nullopt}};
  h.map.assignment.assign(cyl->space()->size(), PointId{});
  for (std::size_t x = 0; x < f.source->size(); ++x) {
    const PointId a = f(PointId{x}), b = g(PointId{x});
    const double D = tgt.distance(a, b);
    for (std::size_t k = 0; k < cyl->column_size(PointId{x}); ++k) {
      const PointId p = cyl->at(PointId{x}, k);
      const double s = static_cast<double>(k) * t_step;
      PointId v;
      if (D == 0.0 || s <= 0.0) {
        v = a;
      } else if (s >= D) {
        v = b;
      } else {
        const double lam = s / D;
        if (cone) {
          const ModelPoint ya = cone->model_point(a), yb = cone->model_point(b);
          const ModelPoint disp = cone->model().displacement(ya, yb);
          const ModelPoint y{ya[0] + lam * disp[0], ya[1] + lam * disp[1]};
          v = cone->snap(y, cone->t(a) + lam * (cone->t(b) - cone->t(a)));
        } else {
          const auto ca = tgt.coords(a), cb = tgt.coords(b);
          std::vector<double> c(ca.size());
          for (std::size_t i = 0; i < c.size(); ++i) c[i] = ca[i] + lam * (cb[i] - ca[i]);
          v = nearest_by_coords(tgt, c);
        }
      }
      h.map.assignment[p.index] = v;
    }
  }
  return h;
}

// ---------------------------------------------------------------------------
// Reparametrization

double LevelLipschitzProfile::at(std::size_t K) const {
  if (L.empty()) throw InputError("Lipschitz profile is empty");
  return K < L.size() ? L[K] : L.back();
}

void LevelLipschitzProfile::validate() const {
  if (L.empty()) throw InputError("Lipschitz profile is empty");
  for (std::size_t k = 0; k < L.size(); ++k) {
    if (!(L[k] >= 1.0) || L[k] != std::floor(L[k]))
      throw InputError("L_K must be an integer >= 1 (K = " + std::to_string(k) + ")");
    if (k > 0 && L[k] < L[k - 1]) throw InputError("L_K must be nondecreasing");
  }
}

Reparametrization reparametrize_to_lipschitz(const LevelLipschitzProfile& profile, double extent) {
  profile.validate();
  if (!(extent > 0.0)) throw InputError("extent must be positive");
  Reparametrization r{profile, {0.0}};
  for (std::size_t k = 0; r.breakpoints.back() < extent; ++k)
    r.breakpoints.push_back(r.breakpoints.back() +
                            profile.at(k + 2) * static_cast<double>(k + 2));
  return r;
}

double Reparametrization::rho(double x) const {
  if (x < 0.0 || x > breakpoints.back()) throw InputError("x outside the reparametrized range");
  auto it = std::upper_bound(breakpoints.begin(), breakpoints.end(), x);
  if (it == breakpoints.end()) return static_cast<double>(breakpoints.size() - 1);
  const std::size_t k = static_cast<std::size_t>(it - breakpoints.begin()) - 1;
  return static_cast<double>(k) + (x - breakpoints[k]) / (breakpoints[k + 1] - breakpoints[k]);
}

std::pair<double, double> Reparametrization::g(double x, double t) const {
  if (x <= 0.0) return {0.0, 0.0};
  const double r = rho(x);
  return {r, t * r / x};
}

CoarseMap Reparametrization::on_grid(const ConeInterval& domain) const {
  CoarseMap m{domain.space(), domain.space(), {}, std::nullopt};
  m.assignment.assign(domain.space()->size(), PointId{});
  const double h = domain.step();
  for (std::size_t i = 0; i < domain.columns(); ++i)
    for (std::size_t k = 0; k <= i; ++k) {
      auto [x, t] = g(static_cast<double>(i) * h, static_cast<double>(k) * h);
      const std::size_t ii = std::min(domain.columns() - 1, floor_index(x / h));
      const std::size_t kk = std::min(ii, floor_index(t / h));
      m.assignment[domain.at(i, k).index] = domain.at(ii, kk);
    }
  return m;
}

LipschitzCheck check_composite_lipschitz(const Reparametrization& rep, const PlaneMap& f,
                                         double extent, double step, std::size_t random_pairs,
                                         double tolerance, std::uint64_t seed) {
  if (!(step > 0.0) || !(extent >= step)) throw InputError("bad lattice for the Lipschitz scan");
  if (extent > rep.breakpoints.back()) throw InputError("extent beyond the reparametrized range");
  LipschitzCheck out;
  auto F = [&](double x, double t) {
    auto [gx, gt] = rep.g(x, t);
    return f(gx, gt);
  };
  auto consider = [&](double x, double t, double x2, double t2) {
    const double d = std::hypot(x - x2, t - t2);
    if (d <= 0.0) return;
    const auto a = F(x, t), b = F(x2, t2);
    const double ratio = std::hypot(a[0] - b[0], a[1] - b[1]) / d;
    ++out.pairs;
    if (ratio > out.worst_ratio) {
      out.worst_ratio = ratio;
      out.worst_pair = {x, t, x2, t2};
    }
  };
  const std::size_t n = floor_index(extent / step);
  const int nbr[4][2] = {{1, 0}, {0, 1}, {1, 1}, {1, -1}};
  for (std::size_t i = 0; i <= n; ++i)
    for (std::size_t k = 0; k <= i; ++k)
      for (const auto& o : nbr) {
        const long long i2 = static_cast<long long>(i) + o[0];
        const long long k2 = static_cast<long long>(k) + o[1];
        if (i2 > static_cast<long long>(n) || k2 < 0 || k2 > i2) continue;
        consider(i * step, k * step, i2 * step, k2 * step);
      }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::size_t s = 0; s < random_pairs; ++s) {
    const double x = extent * unit(rng), t = x * unit(rng);
    const double ang = 2.0 * M_PI * unit(rng), r = unit(rng);
    const double x2 = x + r * std::cos(ang), t2 = t + r * std::sin(ang);
    if (x2 < 0.0 || x2 > extent || t2 < 0.0 || t2 > x2) continue;
    consider(x, t, x2, t2);
  }
  out.cert.param("worst_ratio", out.worst_ratio);
  out.cert.param("tolerance", tolerance);
  out.cert.param("pairs", static_cast<double>(out.pairs));
  if (out.worst_ratio <= 1.0 + tolerance) {
    out.cert.verdict = Verdict::certified;
  } else {
    out.cert.verdict = Verdict::refuted;
    char buf[160];
    std::snprintf(buf, sizeof buf, "ratio %.6g at (%.6g,%.6g)-(%.6g,%.6g)", out.worst_ratio,
                  out.worst_pair[0], out.worst_pair[1], out.worst_pair[2], out.worst_pair[3]);
    out.cert.witness_note = buf;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Contraction

std::pair<double, double> Contraction::h1(double x, double t, double s) const {
  if (x <= 0.0) return {0.0, 0.0};
  const double s_max = std::max(0.0, x - std::max(1.0, std::sqrt(x)));
  const double sc = std::clamp(s, 0.0, s_max);
  const double x2 = x - sc;
  return {x2, t * x2 / x};
}

ConePoint Contraction::alpha_prime(double x, double t) const {
  const double m = std::max(1.0, std::sqrt(std::max(0.0, x)));
  const double h = domain->step();
  const std::size_t i = std::min(domain->columns() - 1,
                                 static_cast<std::size_t>(std::llround(std::max(0.0, x / m) / h)));
  const std::size_t k = std::min(i, static_cast<std::size_t>(std::llround(std::max(0.0, t / m) / h)));
  const PointId v = alpha.map(domain->at(i, k));
  return ConePoint{cone->model_point(v), cone->t(v)};
}

double Contraction::q(const ConePoint& c) const { return cone->model().distance(c.y, p) * c.u - 1.0; }

ConePoint Contraction::h(const ConePoint& c, double s) const {
  return ConePoint{geodesic_point(cone->model(), c.y, p, std::max(0.0, s) / c.u), c.u};
}

Contraction contraction_homotopy(const LoopMap& alpha, const ConePtr& cone, const ModelPoint& p) {
  if (!cone->model().hadamard())
    throw InputError(std::string("contraction needs a Hadamard model, got ") +
                     cone->model().kind_name());
  alpha.validate();
  if (alpha.map.target.get() != cone->space().get())
    throw InputError("loop does not map into the given cone");
  const auto pm = cone->model().find_mesh(p);
  if (!pm) throw InputError("contraction centre must be a mesh point");

  Contraction c{alpha.domain, cone, alpha, p, {}, {}, {}};
  const ConeInterval& d = *alpha.domain;
  const PointId start = cone->vertex(*pm, 0);
  c.alpha.map.assignment[d.at(0, 0).index] = start;
  c.alpha.base.assignment[0] = start;

  const std::size_t n = d.space()->size();
  HeightFunction heights{d.space(), std::vector<double>(n, -1.0)};
  std::vector<ConePoint> ap(n);
  for (std::size_t i = 0; i < d.columns(); ++i)
    for (std::size_t k = 0; k <= i; ++k) {
      const std::size_t id = d.at(i, k).index;
      ap[id] = c.alpha_prime(static_cast<double>(i) * d.step(), static_cast<double>(k) * d.step());
      heights.values[id] = std::max(-1.0, c.q(ap[id]));
    }
  auto cyl = p_cylinder(heights, d.step());
  c.h_prime = Homotopy{cyl, CoarseMap{cyl->space(), cone->space(), {}, std::nullopt}};
  c.h_prime.map.assignment.assign(cyl->space()->size(), PointId{});
  c.beta_prime = CoarseMap{d.space(), cone->space(), std::vector<PointId>(n), std::nullopt};
  for (std::size_t id = 0; id < n; ++id) {
    const std::size_t levels = cyl->column_size(PointId{id});
    for (std::size_t j = 0; j < levels; ++j) {
      // The top level is evaluated at s = q + 1 so the terminal slice sits on p.
      const double s = j + 1 == levels ? heights.values[id] + 1.0 : static_cast<double>(j) * d.step();
      const ConePoint hp = c.h(ap[id], s);
      c.h_prime.map.assignment[cyl->at(PointId{id}, j).index] = cone->snap(hp.y, hp.u);
    }
    c.beta_prime.assignment[id] = c.h_prime.map(cyl->i1(PointId{id}));
  }
  RayMap bray{d.ray(), cone->space(), {}, std::nullopt};
  for (std::size_t i = 0; i < d.columns(); ++i) bray.assignment.push_back(c.beta_prime(d.at(i, 0)));
  c.beta = loop_from(alpha.domain, bray, "contracted(" + alpha.label + ")",
                     [&](std::size_t i, std::size_t) { return bray.assignment[i]; });
  return c;
}

ContractionBounds check_contraction_bounds(const Contraction& c, std::size_t samples,
                                           double tolerance, std::uint64_t seed) {
  ContractionBounds out;
  out.tolerance = tolerance;
  const double extent = static_cast<double>(c.domain->columns() - 1) * c.domain->step();
  if (extent <= 2.0) throw InputError("contraction domain too small for unit pairs with x > 1");
  const ManifoldModel& m = c.cone->model();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto record = [&](int which, double value, const std::array<double, 5>& at) {
    if (value > out.worst_ratio[which]) {
      out.worst_ratio[which] = value;
      out.worst_sample[which] = at;
    }
  };
  std::size_t attempts = 0;
  while (out.pairs < samples) {
    if (++attempts > samples * 1000) throw InputError("could not draw enough unit pairs");
    const double x = 1.0 + (extent - 1.0) * unit(rng);
    const double t = x * unit(rng);
    const double ang = 2.0 * M_PI * unit(rng), r = unit(rng);
    const double x2 = x + r * std::cos(ang), t2 = t + r * std::sin(ang);
    if (x2 <= 1.0 || x2 > extent || t2 < 0.0 || t2 > x2 || r <= 0.0) continue;
    ++out.pairs;
    ConePoint a = c.alpha_prime(x, t), b = c.alpha_prime(x2, t2);
    double xa = x, xb = x2;
    const double qa = c.q(a), qb = c.q(b);
    const double s = std::max(0.0, std::min(qa, qb)) * unit(rng);
    const std::array<double, 5> at{x, t, x2, t2, s};

    record(0, std::abs(qa - qb) / 8.0, at);
    record(1, a.u * m.distance(c.h(a, s).y, c.h(ConePoint{b.y, a.u}, s).y) / 4.0, at);
    ConePoint lo = a, hi = b;
    if (lo.u > hi.u) {
      std::swap(lo, hi);
      std::swap(xa, xb);
    }
    const double second = lo.u * m.distance(geodesic_point(m, hi.y, c.p, s / lo.u),
                                            geodesic_point(m, hi.y, c.p, s / hi.u)) +
                          std::abs(lo.u - hi.u);
    record(2, second / (4.0 + 2.0 / std::sqrt(xa)), at);
    const double s2 = std::max(0.0, qa + 1.0) * unit(rng);
    if (std::abs(s - s2) > 1e-12)
      record(3, a.u * m.distance(c.h(a, s).y, c.h(a, s2).y) / std::abs(s - s2),
             std::array<double, 5>{x, t, x, t, s2});
    record(4, m.distance(a.y, c.p) / (2.0 * std::sqrt(x)), at);
    record(5, a.u / (2.0 * std::sqrt(x)), at);
  }
  static const char* names[6] = {"q_increment", "first_term", "second_term",
                                 "third_coordinate", "distance_to_p", "level"};
  bool ok = true;
  for (int i = 0; i < 6; ++i) {
    out.cert.param(std::string("worst_ratio_") + names[i], out.worst_ratio[i]);
    if (out.worst_ratio[i] > 1.0 + tolerance) ok = false;
  }
  out.cert.param("tolerance", tolerance);
  out.cert.param("pairs", static_cast<double>(out.pairs));
  if (ok) {
    out.cert.verdict = Verdict::certified;
  } else {
    out.cert.verdict = Verdict::refuted;
    int worst = static_cast<int>(std::max_element(out.worst_ratio.begin(), out.worst_ratio.end()) -
                                 out.worst_ratio.begin());
    const auto& w = out.worst_sample[worst];
    char buf[200];
    std::snprintf(buf, sizeof buf, "%s ratio %.6g at (%.6g,%.6g)-(%.6g,%.6g) s=%.6g",
                  names[worst], out.worst_ratio[worst], w[0], w[1], w[2], w[3], w[4]);
    out.cert.witness_note = buf;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Boundary fix

CylinderPtr boundary_fix_cylinder(const ConeInterval& domain) {
  HeightFunction hf{domain.space(), std::vector<double>(domain.space()->size(), -1.0)};
  for (std::size_t i = 0; i < domain.columns(); ++i)
    for (std::size_t k = 0; k <= i; ++k)
      hf.values[domain.at(i, k).index] = static_cast<double>(i) * domain.step() - 1.0;
  return p_cylinder(hf, domain.step());
}

BoundaryFix::BoundaryFix(Homotopy H, ConeIntervalPtr domain, RayMap b)
    : H_(std::move(H)), domain_(std::move(domain)), b_(std::move(b)) {
  H_.validate();
  if (H_.cylinder->base().get() != domain_->space().get())
    throw InputError("homotopy must be over the given cone interval");
  if (b_.size() != domain_->columns()) throw InputError("base ray length differs from the grid");
  for (std::size_t i = 0; i < domain_->columns(); ++i) {
    for (std::size_t k = 0; k <= i; ++k)
      if (H_.cylinder->column_size(domain_->at(i, k)) != i + 1)
        throw InputError("homotopy cylinder must have height x - 1 over column " +
                         std::to_string(i));
    for (std::size_t j = 0; j <= i; ++j)
      if (h(i, 0, j) != h(i, i, j))
        throw InputError("matching condition H((x,0),s) = H((x,x),s) fails at column " +
                         std::to_string(i) + ", level " + std::to_string(j));
  }
}

PointId BoundaryFix::h(std::size_t i, std::size_t k, std::size_t j) const {
  return H_.map(H_.cylinder->at(domain_->at(i, k), j));
}

int BoundaryFix::branch(std::size_t i, std::size_t k, std::size_t j) const {
  const long long k4 = 4 * static_cast<long long>(k);
  const long long ii = static_cast<long long>(i), jj = static_cast<long long>(j);
  if (k4 <= ii - jj) return 1;
  if (k4 <= ii) return 2;
  if (k4 <= 3 * ii) return 3;
  if (k4 <= 3 * ii + jj) return 4;
  return 5;
}

PointId BoundaryFix::eval_branch(int branch, std::size_t i, std::size_t k, std::size_t j) const {
  const long long k4 = 4 * static_cast<long long>(k);
  const long long ii = static_cast<long long>(i), jj = static_cast<long long>(j);
  auto level = [&](long long v) -> std::size_t {
    if (v < 0 || v > ii)
      throw InputError("branch " + std::to_string(branch) + " undefined at this grid point");
    return static_cast<std::size_t>(v);
  };
  switch (branch) {
    case 1:
    case 5:
      return b_.assignment.at(i);
    case 2:
      return h(i, 0, level(k4 - ii + jj));
    case 3:
      return h(i, level(floor_div(k4 - ii, 2)), j);
    case 4:
      return h(i, 0, level(3 * ii - k4 + jj));
    default:
      throw InputError("branch index must be 1..5");
  }
}

Homotopy BoundaryFix::build() const {
  Homotopy out{H_.cylinder, CoarseMap{H_.cylinder->space(), H_.map.target, {}, std::nullopt}};
  out.map.assignment.assign(H_.cylinder->space()->size(), PointId{});
  for (std::size_t i = 0; i < domain_->columns(); ++i)
    for (std::size_t k = 0; k <= i; ++k)
      for (std::size_t j = 0; j <= i; ++j)
        out.map.assignment[H_.cylinder->at(domain_->at(i, k), j).index] = (*this)(i, k, j);
  return out;
}

BoundaryFixReport check_boundary_fix(const BoundaryFix& fix, const Homotopy& h_prime,
                                     const ConeInterval& domain, const RayMap& b) {
  BoundaryFixReport r;
  const PCylinder& cyl = *h_prime.cylinder;
  std::vector<PointId> first_bad;
  for (std::size_t i = 0; i < domain.columns(); ++i)
    for (std::size_t j = 0; j <= i; ++j) {
      const PointId lo = cyl.at(domain.at(i, 0), j), hi = cyl.at(domain.at(i, i), j);
      if (h_prime.map(lo) != b.assignment[i] || h_prime.map(hi) != b.assignment[i]) {
        ++r.boundary_violations;
        if (first_bad.empty()) first_bad = {lo, hi};
      }
    }
  auto seam = [&](int left, std::size_t i, std::size_t k, std::size_t j) {
    ++r.seams_checked;
    if (fix.eval_branch(left, i, k, j) != fix.eval_branch(left + 1, i, k, j)) {
      ++r.seam_mismatches;
      if (first_bad.empty()) first_bad = {cyl.at(domain.at(i, k), j)};
    }
  };
  for (std::size_t i = 0; i < domain.columns(); ++i)
    for (std::size_t k = 0; k <= i; ++k)
      for (std::size_t j = 0; j <= i; ++j) {
        const std::size_t k4 = 4 * k;
        if (k4 + j == i) seam(1, i, k, j);
        if (k4 == i) seam(2, i, k, j);
        if (k4 == 3 * i) seam(3, i, k, j);
        if (k4 == 3 * i + j) seam(4, i, k, j);
      }
  r.cert.param("boundary_violations", static_cast<double>(r.boundary_violations));
  r.cert.param("seam_mismatches", static_cast<double>(r.seam_mismatches));
  r.cert.param("seams_checked", static_cast<double>(r.seams_checked));
  if (r.boundary_violations == 0 && r.seam_mismatches == 0) {
    r.cert.verdict = Verdict::certified;
  } else {
    r.cert.verdict = Verdict::refuted;
    r.cert.witness = first_bad;
    r.cert.witness_note = r.boundary_violations ? "boundary moves under the fixed homotopy"
                                                : "branches disagree on a seam";
  }
  return r;
}

// ---------------------------------------------------------------------------
// Pasting

Certification check_pasting(const CoarseMap& f, const std::vector<std::vector<PointId>>& pieces,
                            const PastingOptions& opts) {
  f.validate();
  const MetricSpace& src = *f.source;
  const MetricSpace& tgt = *f.target;
  const std::size_t n = src.size();
  if (pieces.empty()) throw InputError("pasting needs at least one piece");
  std::vector<std::vector<std::size_t>> member(n);
  for (std::size_t pi = 0; pi < pieces.size(); ++pi)
    for (const auto& p : pieces[pi]) {
      src.check(p);
      member[p.index].push_back(pi);
    }
  for (std::size_t x = 0; x < n; ++x)
    if (member[x].empty())
      throw InputError("pieces do not cover point " + std::to_string(x));
  auto share = [&](std::size_t a, std::size_t b) {
    for (auto u : member[a])
      for (auto v : member[b])
        if (u == v) return true;
    return false;
  };

  Certification cert;
  if (opts.mode == PastingMode::lipschitz) {
    double piece_c = 0.0, global_c = 0.0;
    std::pair<std::size_t, std::size_t> wit{0, 0};
    for (std::size_t a = 0; a < n; ++a) {
      const auto row = src.distances_from(PointId{a});
      const auto trow = tgt.distances_from(f.assignment[a]);
      for (std::size_t b = a + 1; b < n; ++b) {
        if (row[b] <= 0.0) continue;
        const double ratio = trow[f.assignment[b].index] / row[b];
        if (share(a, b)) piece_c = std::max(piece_c, ratio);
        if (ratio > global_c) {
          global_c = ratio;
          wit = {a, b};
        }
      }
    }
    cert.param("piece_constant", piece_c);
    cert.param("global_constant", global_c);
    cert.param("tolerance", opts.tolerance);
    if (global_c <= piece_c * (1.0 + opts.tolerance)) {
      cert.verdict = Verdict::certified;
    } else {
      cert.verdict = Verdict::refuted;
      cert.witness = {PointId{wit.first}, PointId{wit.second}};
      cert.witness_note = "pair stretched beyond the largest piece constant";
    }
    return cert;
  }

  if (!(opts.link > 0.0)) throw InputError("chain link must be positive");
  const double link = opts.link * (1.0 + 1e-9);
  const double rmax = opts.radii.empty() ? 0.0 : *std::max_element(opts.radii.begin(), opts.radii.end());
  double piece_link = 0.0, seam = 0.0;
  std::vector<double> piece_prof(opts.radii.size(), 0.0), global(opts.radii.size(), 0.0);
  std::vector<std::vector<std::size_t>> adj(n);
  for (std::size_t a = 0; a < n; ++a) {
    const auto near = src.distances_within(PointId{a}, std::max(link, rmax));
    for (const auto& [b, d] : near) {
      if (b.index == a) continue;
      const double dt = tgt.distance(f.assignment[a], f.assignment[b.index]);
      const bool same = share(a, b.index);
      if (d <= link) {
        adj[a].push_back(b.index);
        (same ? piece_link : seam) = std::max(same ? piece_link : seam, dt);
      }
      for (std::size_t r = 0; r < opts.radii.size(); ++r)
        if (d <= opts.radii[r]) {
          global[r] = std::max(global[r], dt);
          if (same) piece_prof[r] = std::max(piece_prof[r], dt);
        }
    }
  }
  const double link_bound = std::max(piece_link, seam);
  std::vector<std::size_t> max_hops(opts.radii.size(), 0);
  for (std::size_t a = 0; a < n; ++a) {
    std::vector<std::size_t> hops(n, std::numeric_limits<std::size_t>::max());
    std::deque<std::size_t> queue{a};
    hops[a] = 0;
    while (!queue.empty()) {
      const std::size_t u = queue.front();
      queue.pop_front();
      for (auto v : adj[u])
        if (hops[v] == std::numeric_limits<std::size_t>::max()) {
          hops[v] = hops[u] + 1;
          queue.push_back(v);
        }
    }
    for (const auto& [b, d] : src.distances_within(PointId{a}, rmax)) {
      if (hops[b.index] == std::numeric_limits<std::size_t>::max()) {
        cert.verdict = Verdict::refuted;
        cert.witness = {PointId{a}, b};
        cert.witness_note = "no chain of short links joins this pair";
        return cert;
      }
      for (std::size_t r = 0; r < opts.radii.size(); ++r)
        if (d <= opts.radii[r]) max_hops[r] = std::max(max_hops[r], hops[b.index]);
    }
  }
  cert.param("link", opts.link);
  cert.param("piece_link_bound", piece_link);
  cert.param("seam_link_bound", seam);
  bool ok = true;
  for (std::size_t r = 0; r < opts.radii.size(); ++r) {
    const double bound = static_cast<double>(max_hops[r]) * link_bound;
    cert.trend.push_back({opts.radii[r], global[r]});
    cert.param("piece_profile_at_" + std::to_string(opts.radii[r]), piece_prof[r]);
    cert.param("chain_bound_at_" + std::to_string(opts.radii[r]), bound);
    if (global[r] > bound * (1.0 + opts.tolerance) + 1e-9) ok = false;
  }
  cert.verdict = ok ? Verdict::certified : Verdict::refuted;
  if (!ok) cert.witness_note = "global profile exceeds the chained piece bound";
  return cert;
}

std::string homotopy_csv(const Homotopy& h) {
  const PCylinder& cyl = *h.cylinder;
  const MetricSpace& base = *cyl.base();
  std::string out;
  if (base.coord_dim() == 2) out = "x,t";
  else if (base.coord_dim() == 1) out = "x";
  else out = "base";
  out += ",s,target_point\n";
  char buf[64];
  for (std::size_t x = 0; x < base.size(); ++x)
    for (std::size_t k = 0; k < cyl.column_size(PointId{x}); ++k) {
      const PointId p = cyl.at(PointId{x}, k);
      if (base.coord_dim() == 0) {
        out += std::to_string(x);
      } else {
        bool first = true;
        for (double c : base.coords(PointId{x})) {
          std::snprintf(buf, sizeof buf, first ? "%.12g" : ",%.12g", c);
          out += buf;
          first = false;
        }
      }
      std::snprintf(buf, sizeof buf, ",%.12g,%zu\n", cyl.t(p), h.map(p).index);
      out += buf;
    }
  return out;
}

}  // namespace coarsekit
