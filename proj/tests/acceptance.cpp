// Copyright 2026 The coarsekit Authors
// SPDX-License-Identifier: Apache-2.0

// Acceptance suite. Prints one PASS/FAIL line per criterion and exits with
// the number of failures.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "coarsekit/experiment.hpp"
#include "coarsekit/group_quotient.hpp"
#include "coarsekit/homotopy_lab.hpp"
#include "coarsekit/lifting.hpp"
#include "oracles.hpp"

namespace ck = coarsekit;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

int failures = 0;

void criterion(const char* id, const char* title, double budget_s, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (secs > budget_s) {
    o.pass = false;
    o.detail += " [over budget]";
  }
  if (!o.pass) ++failures;
  std::printf("%s %s  %s (%.1fs / %.0fs)  %s\n", id, o.pass ? "PASS" : "FAIL", title, secs, budget_s,
              o.detail.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

double excess(const ck::ConeInequalityReport& r) {
  return std::max({r.worst_ratio[0] - 1.0, r.worst_ratio[1] - 1.0, r.worst_ratio[2] - 1.0, 0.0});
}

// The circle covering used by the discontinuity, lifting and correspondence
// criteria.
const ck::ConeCovering& circle_covering() {
  static const ck::ConeCovering cov = ck::make_cone_covering(ck::ManifoldModel::circle(1.0, 0.125), 5.0, 11.0, 0.25);
  return cov;
}

const ck::LiftCertificate& circle_certificate() {
  static const ck::LiftCertificate cert = ck::build_lift_certificate(
      circle_covering().pi, {0.5, 1.0, 2.0, 4.0, 8.0}, {1.0, 2.0, 4.0, 8.0, 16.0}, circle_covering().interior);
  return cert;
}

double column_turns(const ck::ConeSpace& base, const ck::LoopMap& alpha, std::size_t i, int axis) {
  std::vector<double> angles;
  for (std::size_t k = 0; k <= i; ++k)
    angles.push_back(base.model_point(alpha.map(alpha.domain->at(i, k)))[axis] /
                     base.model().periods()[axis]);
  return oracle::unwrapped_turns(angles);
}

Outcome ac1() {
  const auto coarse = ck::metric_cone(ck::ManifoldModel::circle(1.0, 0.25), 16.0, 0.25);
  const auto fine = ck::metric_cone(ck::ManifoldModel::circle(1.0, 0.125), 16.0, 0.25);
  const auto a = ck::check_cone_inequalities(*coarse, 10000, 0.1, 0);
  const auto b = ck::check_cone_inequalities(*fine, 10000, 0.1, 0);
  Outcome o;
  o.pass = a.cert.certified() && b.cert.certified() && excess(b) <= excess(a) + 1e-12;
  o.detail = "worst ratios " + fmt("%.4f", a.worst_ratio[0]) + "/" + fmt("%.4f", a.worst_ratio[1]) + "/" +
             fmt("%.4f", a.worst_ratio[2]) + ", excess " + fmt("%.4g", excess(a)) + " -> " +
             fmt("%.4g", excess(b));
  return o;
}

Outcome ac2() {
  const auto r = ck::check_cat0_convexity(ck::ManifoldModel::plane(8.0, 0.25), 10000, 0);
  return {r.cert.certified() && r.worst_excess <= 1e-9, "worst excess " + fmt("%.3g", r.worst_excess)};
}

Outcome ac3() {
  const auto& cov = circle_covering();
  const auto& cover = *cov.cover;
  const auto& base = *cov.base;
  const auto& src = *cover.space();
  const auto& tgt = *base.space();
  Outcome o;
  const auto disp = ck::min_displacement(cov.action, 4);
  if (!disp.free() || std::fabs(disp.value - 1.0) > 1e-12) {
    o.pass = false;
    o.detail += "min displacement " + fmt("%.6g", disp.value) + "; ";
  }
  const std::size_t n = src.size();
  const auto els = cov.action.elements(4);
  const auto base_row = tgt.distances_from(tgt.basepoint());
  for (double R : {1.0, 2.0, 4.0}) {
    // Exhaustive scan of cover points moved by at most R.
    std::vector<bool> moved(n, false);
    double height = 0.0;
    for (std::size_t x = 0; x < n; ++x) {
      const auto near = src.distances_within(ck::PointId{x}, R);
      for (const auto& g : els) {
        if (g.is_identity()) continue;
        const auto y = cov.action.apply(g, ck::PointId{x});
        if (!y) continue;
        if (std::any_of(near.begin(), near.end(), [&](const auto& e) { return e.first == *y; })) {
          moved[x] = true;
          break;
        }
      }
      if (moved[x]) height = std::max(height, cover.t(ck::PointId{x}));
    }
    const auto ucd = ck::certify_uniform_coarse_discontinuity(cov.action, R, 4);
    if (height > R + R / disp.value + 1e-12 || std::fabs(ucd.max_bad_height - height) > 1e-12) {
      o.pass = false;
      o.detail += "R=" + fmt("%g", R) + " moved height " + fmt("%g", height) + "; ";
    }

    // Base points whose fibre has two distinct points within R must lie one
    // mesh step from the image of the moved set.
    std::vector<bool> image(tgt.size(), false);
    double image_radius = 0.0;
    for (std::size_t x = 0; x < n; ++x)
      if (moved[x]) {
        const auto y = cov.pi(ck::PointId{x});
        image[y.index] = true;
        image_radius = std::max(image_radius, base_row[y.index]);
      }
    std::vector<std::vector<ck::PointId>> fibres(tgt.size());
    for (std::size_t x = 0; x < n; ++x) fibres[cov.pi(ck::PointId{x}).index].push_back(ck::PointId{x});
    std::size_t scattered_bad = 0, outside = 0;
    for (std::size_t y = 0; y < tgt.size(); ++y) {
      bool bad = false;
      for (std::size_t i = 0; i < fibres[y].size() && !bad; ++i) {
        const auto row = src.distances_from(fibres[y][i]);
        for (std::size_t j = i + 1; j < fibres[y].size(); ++j)
          if (row[fibres[y][j].index] <= R) bad = true;
      }
      if (!bad) continue;
      ++scattered_bad;
      const double step = std::max(base.t_step(), base.model().mesh() * base.t(ck::PointId{y}));
      const auto near = tgt.distances_within(ck::PointId{y}, step);
      if (std::none_of(near.begin(), near.end(), [&](const auto& e) { return image[e.first.index]; })) ++outside;
    }
    const auto sc = ck::certify_scattered_fibres(cov.pi, R);
    if (outside > 0 || !sc.cert.certified() || (!sc.K.empty && sc.K.radius > image_radius + base.t_step() + 1e-12)) {
      o.pass = false;
      o.detail += "R=" + fmt("%g", R) + " scattered set escapes (" + std::to_string(outside) + " of " +
                  std::to_string(scattered_bad) + "); ";
    }
  }
  const std::vector<double> radii{1.0, 2.0, 4.0};
  const auto soft = ck::certify_soft_quotient(cov.pi, radii, cov.interior);
  double worst_gap = -1e300;
  for (const auto& row : soft.rows) worst_gap = std::max(worst_gap, row.S - row.R);
  if (worst_gap > 2.0 * cov.cover->model().mesh() + 1e-12) {
    o.pass = false;
    o.detail += "softness too large; ";
  }
  o.detail += "max S(R)-R " + fmt("%.4g", worst_gap);
  return o;
}

Outcome ac4() {
  const auto& cov = circle_covering();
  const auto& cert = circle_certificate();
  const auto domain = ck::cone_interval(10.0, 0.25);
  const auto bp = ck::standard_cone_ray(*cov.cover, domain->ray());
  const ck::Homotopy f = ck::winding_loop(domain, *cov.base, {1, 0}).as_homotopy();
  const ck::CoarseMap f0{f.cylinder->base(), cov.pi.source, bp.assignment, std::nullopt};
  ck::LiftOptions lo;
  const ck::Homotopy a = ck::lift_homotopy(cov.pi, cert, f, f0, lo);
  lo.tie_break = ck::TieBreak::largest_id;
  const ck::Homotopy b = ck::lift_homotopy(cov.pi, cert, f, f0, lo);
  const auto step = ck::lift_step_bound(cert, f);
  const auto& cyl = *f.cylinder;
  const auto& cover = *cov.cover->space();
  std::size_t commute = 0, initial = 0, long_steps = 0;
  for (std::size_t x = 0; x < cyl.base()->size(); ++x) {
    if (a.map(cyl.i0(ck::PointId{x})) != f0(ck::PointId{x})) ++initial;
    for (std::size_t k = 0; k < cyl.column_size(ck::PointId{x}); ++k) {
      const ck::PointId p = cyl.at(ck::PointId{x}, k);
      if (cov.pi(a.map(p)) != f.map(p)) ++commute;
      if (k > 0 && cover.distance(a.map(cyl.at(ck::PointId{x}, k - 1)), a.map(p)) > step.T) ++long_steps;
    }
  }
  const auto bounds = ck::lift_bounds(cov.pi, cert, f, f0);
  const auto defect = ck::uniqueness_defect(cov.pi, f, f0, a, b);
  bool confined = defect.empty || defect.ball.radius <= bounds.exceptional_radius;
  for (auto p : defect.disagreements) confined = confined && defect.ball.contains(p);
  Outcome o;
  o.pass = commute == 0 && initial == 0 && long_steps == 0 && confined;
  o.detail = std::to_string(commute) + " commutation / " + std::to_string(initial) + " initial / " +
             std::to_string(long_steps) + " step failures, T " + fmt("%.4g", step.T) + ", " +
             std::to_string(defect.disagreements.size()) + " tie-break disagreements within radius " +
             fmt("%.4g", bounds.exceptional_radius);
  return o;
}

Outcome ac5() {
  Outcome o;
  {
    const auto& cov = circle_covering();
    const auto domain = ck::cone_interval(10.0, 0.25);
    const auto bp = ck::standard_cone_ray(*cov.cover, domain->ray());
    std::vector<ck::LoopMap> loops;
    for (int m = -2; m <= 2; ++m) loops.push_back(ck::winding_loop(domain, *cov.base, {m, 0}));
    std::vector<ck::SesProduct> products;
    for (std::size_t a = 0; a < loops.size(); ++a)
      for (std::size_t b = 0; b < loops.size(); ++b) products.push_back({a, b, ck::concatenate(loops[a], loops[b])});
    const auto rep = ck::verify_ses_instance(cov.action, cov.pi, circle_certificate(), bp, loops, products, 5.0);
    const std::size_t last = domain->columns() - 1;
    for (std::size_t i = 0; i < loops.size(); ++i) {
      const int m = int(i) - 2;
      const long oracle_m = std::lround(column_turns(*cov.base, loops[i], last, 0));
      if (rep.loops[i].cls.g.coords != std::vector<int>{m} || oracle_m != m) {
        o.pass = false;
        o.detail += "winding " + std::to_string(m) + " misclassified; ";
      }
    }
    std::size_t bad_products = 0;
    for (const auto& p : rep.products) {
      const long oracle_m = std::lround(column_turns(*cov.base, products[&p - rep.products.data()].loop, last, 0));
      if (!p.ok || p.product_g.coords != std::vector<int>{int(oracle_m)}) ++bad_products;
    }
    // Kernel witnesses: the trivial loop and winding 1 followed by winding -1.
    const std::size_t one_then_minus_one = 3 * loops.size() + 1;
    const auto cancel_end = ck::lifting_correspondence(cov.pi, circle_certificate(),
                                                       products[one_then_minus_one].loop, bp);
    const bool cancel_closes = ck::lifts_equivalent(cov.pi, bp, cancel_end, 5.0).equivalent;
    if (!rep.homomorphism_ok || bad_products > 0 || !rep.kernel_ok || !rep.loops[2].closes_up || !cancel_closes) {
      o.pass = false;
      o.detail += std::to_string(bad_products) + " bad products, kernel " + (rep.kernel_ok ? "ok" : "broken") + "; ";
    }
    o.detail += "circle: 5 loops, " + std::to_string(rep.products.size()) + " products; ";
  }
  {
    const auto cov = ck::make_cone_covering(ck::ManifoldModel::torus(1.0, 1.0, 0.25), 2.0, 7.0, 0.25);
    const auto cert = ck::build_lift_certificate(cov.pi, {0.5, 1.0, 2.0, 4.0}, {1.0, 2.0, 4.0, 8.0}, cov.interior);
    const auto domain = ck::cone_interval(6.0, 0.25);
    const auto bp = ck::standard_cone_ray(*cov.cover, domain->ray());
    const std::size_t last = domain->columns() - 1;
    for (std::array<int, 2> w : {std::array<int, 2>{1, 0}, {0, 1}, {1, 1}}) {
      const auto alpha = ck::winding_loop(domain, *cov.base, w);
      const auto end = ck::lifting_correspondence(cov.pi, cert, alpha, bp);
      const auto cls = ck::classify_lift(cov.action, cov.pi, bp, end, 3.0, 3);
      const std::vector<int> oracle_w{int(std::lround(column_turns(*cov.base, alpha, last, 0))),
                                      int(std::lround(column_turns(*cov.base, alpha, last, 1)))};
      if (cls.g.coords != std::vector<int>{w[0], w[1]} || oracle_w != cls.g.coords) {
        o.pass = false;
        o.detail += "torus winding (" + std::to_string(w[0]) + "," + std::to_string(w[1]) + ") misclassified; ";
      }
    }
    o.detail += "torus: 3 windings";
  }
  return o;
}

Outcome ac6() {
  std::vector<double> worst;
  Outcome o;
  for (double h : {0.25, 0.125}) {
    const double extent = 16.0;
    const auto cone = ck::metric_cone(ck::ManifoldModel::plane(1.0, h), 1.0 + extent / 3.0 + h, h);
    const auto domain = ck::cone_interval(extent, h);
    ck::RayMap base{domain->ray(), cone->space(), {}, std::nullopt};
    for (std::size_t i = 0; i < domain->columns(); ++i)
      base.assignment.push_back(cone->snap({0.0, 0.0}, 1.0 + double(i) * h / 3.0));
    const auto alpha = ck::loop_from(domain, base, "bump", [&](std::size_t i, std::size_t k) {
      const double x = double(i) * h, t = double(k) * h, u = 1.0 + x / 3.0;
      return cone->snap({std::min(t, x - t) / (3.0 * u), 0.0}, u);
    });
    const auto c = ck::contraction_homotopy(alpha, cone, {0.0, 0.0});
    const auto b = ck::check_contraction_bounds(c, 1000, 0.15, 0);
    bool on_p = true;
    for (const auto& v : c.beta_prime.assignment) on_p = on_p && cone->model_point(v) == ck::ModelPoint{0.0, 0.0};
    // The third-coordinate bound is an identity, so only the first three
    // ratios carry discretisation error.
    const double w = *std::max_element(b.worst_ratio.begin(), b.worst_ratio.begin() + 3);
    worst.push_back(w);
    o.pass = o.pass && b.cert.certified() && on_p;
    o.detail += "mesh " + fmt("%g", h) + " worst " + fmt("%.4f", w) + "; ";
  }
  o.pass = o.pass && worst[1] < worst[0];
  return o;
}

Outcome ac7() {
  ck::LevelLipschitzProfile prof;
  const double extent = 40.0;
  for (int K = 0; K <= int(extent) + 2; ++K) prof.L.push_back(std::max(1, K));
  const auto rep = ck::reparametrize_to_lipschitz(prof, extent);
  auto f = [](double x, double t) { return std::array<double, 2>{x * x / 2.0, t * t / 2.0}; };
  const auto r = ck::check_composite_lipschitz(rep, f, extent, 0.25, 10000, 0.05, 0);
  // Independent sample of nearby pairs in the triangle 0 <= t <= x <= extent.
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  std::vector<std::pair<std::array<double, 2>, std::array<double, 2>>> pairs;
  while (pairs.size() < 20000) {
    const double x = U(rng) * extent, t = U(rng) * x;
    const double dx = (U(rng) - 0.5) * 0.5, dt = (U(rng) - 0.5) * 0.5;
    const double x2 = x + dx, t2 = t + dt;
    if (x2 < 0.0 || x2 > extent || t2 < 0.0 || t2 > x2 || (dx == 0.0 && dt == 0.0)) continue;
    pairs.push_back({{x, t}, {x2, t2}});
  }
  const double worst = oracle::lipschitz_ratio(
      [&](double x, double t) {
        const auto [a, b] = rep.g(x, t);
        return f(a, b);
      },
      pairs);
  return {r.cert.certified() && worst <= 1.05,
          "library ratio " + fmt("%.4f", r.worst_ratio) + ", sampled ratio " + fmt("%.4f", worst)};
}

Outcome ac8() {
  const auto domain = ck::cone_interval(24.0, 1.0);
  const auto cyl = ck::boundary_fix_cylinder(*domain);
  ck::Homotopy H{cyl, ck::CoarseMap{cyl->space(), domain->space(), {}, std::nullopt}};
  H.map.assignment.assign(cyl->space()->size(), ck::PointId{});
  for (std::size_t i = 0; i < domain->columns(); ++i)
    for (std::size_t k = 0; k <= i; ++k)
      for (std::size_t j = 0; j <= i; ++j)
        H.map.assignment[cyl->at(domain->at(i, k), j).index] = domain->at(i, std::min(i, j + std::min(k, i - k)));
  ck::RayMap b{domain->ray(), domain->space(), {}, std::nullopt};
  for (std::size_t i = 0; i < domain->columns(); ++i) b.assignment.push_back(domain->at(i, 0));
  const ck::BoundaryFix fix(H, domain, b);
  const ck::Homotopy hp = fix.build();
  const auto r = ck::check_boundary_fix(fix, hp, *domain, b);
  std::size_t boundary = 0, seams = 0, checked = 0;
  for (std::size_t i = 0; i < domain->columns(); ++i)
    for (std::size_t j = 0; j <= i; ++j) {
      for (std::size_t k : {std::size_t{0}, i})
        if (hp.map(cyl->at(domain->at(i, k), j)) != b.assignment[i]) ++boundary;
      for (std::size_t k = 0; k <= i; ++k) {
        if (4 * k == i) {
          ++checked;
          if (fix.eval_branch(2, i, k, j) != fix.eval_branch(3, i, k, j)) ++seams;
        }
        if (4 * k == 3 * i) {
          ++checked;
          if (fix.eval_branch(3, i, k, j) != fix.eval_branch(4, i, k, j)) ++seams;
        }
      }
    }
  return {r.cert.certified() && boundary == 0 && seams == 0 && checked > 0,
          std::to_string(boundary) + " boundary violations, " + std::to_string(seams) + " of " +
              std::to_string(checked) + " seam points mismatched"};
}

Outcome ac9() {
  namespace fs = std::filesystem;
  std::vector<fs::path> specs;
  for (const auto& e : fs::directory_iterator(COARSEKIT_SPECS))
    if (e.path().extension() == ".json") specs.push_back(e.path());
  std::sort(specs.begin(), specs.end());
  Outcome o;
  for (const auto& p : specs) {
    ck::RunOptions one, four;
    one.threads = 1;
    four.threads = 4;
    const auto a = ck::run_experiment_file(p.string(), one);
    const auto b = ck::run_experiment_file(p.string(), four);
    if (ck::dump_report(a.report) != ck::dump_report(b.report) || a.exit_code != ck::kExitOk) {
      o.pass = false;
      o.detail += p.filename().string() + " differs or failed; ";
    }
  }
  o.detail += std::to_string(specs.size()) + " specs rerun";
  return o;
}

}  // namespace

int main() {
  criterion("AC1", "cone inequalities on the circle cone", 30, ac1);
  criterion("AC2", "max-convexity of plane geodesics", 5, ac2);
  criterion("AC3", "discontinuity, scattered fibres and softness", 120, ac3);
  criterion("AC4", "homotopy lifting", 60, ac4);
  criterion("AC5", "winding correspondence", 300, ac5);
  criterion("AC6", "contraction bounds", 120, ac6);
  criterion("AC7", "Lipschitz reparametrization", 30, ac7);
  criterion("AC8", "boundary fix", 10, ac8);
  criterion("AC9", "byte-identical reruns of bundled specs", 1800, ac9);
  std::printf("%d of 9 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
