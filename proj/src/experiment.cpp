// Copyright 2026 The coarsekit Authors
// SPDX-License-Identifier: Apache-2.0

#include "coarsekit/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <memory>
#include <set>
#include <sstream>

#include "coarsekit/errors.hpp"
#include "coarsekit/homotopy_lab.hpp"
#include "coarsekit/lifting.hpp"

namespace coarsekit {

namespace fs = std::filesystem;

namespace {

struct Artifact {
  SpacePtr space;
  ConePtr cone;
  std::shared_ptr<const ConeCovering> covering;
  std::shared_ptr<const LiftCertificate> certificate;
};

struct Context {
  std::map<std::string, Artifact> artifacts;
  std::uint64_t seed = 0;
  unsigned threads = 0;
  std::optional<double> tolerance;
  std::string spec_dir;
  std::vector<std::pair<std::string, std::string>> side_files;
};

struct StageOutcome {
  Verdict verdict = Verdict::certified;
  json result = json::object();
};

double param(const json& p, const char* key, double fallback) {
  if (!p.contains(key)) return fallback;
  if (!p.at(key).is_number()) throw InputError(std::string("parameter \"") + key + "\" must be a number");
  return p.at(key).get<double>();
}

std::vector<double> param_list(const json& p, const char* key, std::vector<double> fallback) {
  if (!p.contains(key)) return fallback;
  if (!p.at(key).is_array()) throw InputError(std::string("parameter \"") + key + "\" must be a list");
  return p.at(key).get<std::vector<double>>();
}

std::string param_str(const json& p, const char* key, const std::string& fallback) {
  if (!p.contains(key)) return fallback;
  if (!p.at(key).is_string()) throw InputError(std::string("parameter \"") + key + "\" must be a string");
  return p.at(key).get<std::string>();
}

double tolerance_of(const Context& ctx, const json& p, double fallback) {
  return ctx.tolerance ? *ctx.tolerance : param(p, "tolerance", fallback);
}

std::vector<std::string> uses_of(const json& stage) {
  std::vector<std::string> out;
  if (!stage.contains("uses")) return out;
  const auto& u = stage.at("uses");
  if (u.is_string()) out.push_back(u.get<std::string>());
  else if (u.is_array())
    for (const auto& e : u) out.push_back(e.get<std::string>());
  else throw InputError("\"uses\" must be a stage name or a list of names");
  return out;
}

const Artifact& use(const Context& ctx, const json& stage, std::size_t i) {
  const auto names = uses_of(stage);
  if (i >= names.size()) throw InputError("stage needs an input in \"uses\" position " + std::to_string(i));
  auto it = ctx.artifacts.find(names[i]);
  if (it == ctx.artifacts.end()) throw InputError("unknown artifact \"" + names[i] + "\"");
  return it->second;
}

const ConeCovering& covering_of(const Context& ctx, const json& stage) {
  const Artifact& a = use(ctx, stage, 0);
  if (!a.covering) throw InputError("stage needs a cone-covering artifact");
  return *a.covering;
}

const LiftCertificate& certificate_of(const Context& ctx, const json& stage) {
  const Artifact& a = use(ctx, stage, 1);
  if (!a.certificate) throw InputError("stage needs a lift-certificate artifact as its second input");
  return *a.certificate;
}

ConePtr cone_of(const Context& ctx, const json& stage) {
  const Artifact& a = use(ctx, stage, 0);
  if (a.cone) return a.cone;
  if (a.covering) return a.covering->base;
  throw InputError("stage needs a cone artifact");
}

ManifoldModel refined(const ManifoldModel& m) {
  const double h = m.mesh() / 2.0;
  switch (m.kind()) {
    case ManifoldModel::Kind::circle: return ManifoldModel::circle(m.periods()[0], h);
    case ManifoldModel::Kind::flat_torus: return ManifoldModel::torus(m.periods()[0], m.periods()[1], h);
    case ManifoldModel::Kind::euclidean_line: return ManifoldModel::line(m.half_width(), h);
    case ManifoldModel::Kind::euclidean_plane: return ManifoldModel::plane(m.half_width(), h);
  }
  throw InputError("unknown model kind");
}

json certification_verdict(Verdict v) { return to_string(v); }

Verdict worst(Verdict a, Verdict b) {
  if (a == Verdict::refuted || b == Verdict::refuted) return Verdict::refuted;
  if (a == Verdict::inconclusive || b == Verdict::inconclusive) return Verdict::inconclusive;
  return Verdict::certified;
}

std::array<int, 2> winding_of(const json& w) {
  std::array<int, 2> out{0, 0};
  if (w.is_number_integer()) {
    out[0] = w.get<int>();
    return out;
  }
  if (!w.is_array() || w.empty() || w.size() > 2) throw InputError("winding must be [m] or [a, b]");
  for (std::size_t i = 0; i < w.size(); ++i) out[i] = w[i].get<int>();
  return out;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

// ---------------------------------------------------------------------------
// build

StageOutcome stage_build(const json& stage, const json& p, Context& ctx) {
  StageOutcome out;
  const std::string object = param_str(p, "object", "");
  Artifact art;
  if (object == "space") {
    if (!p.contains("space")) throw InputError("build space needs a \"space\" descriptor");
    art.space = space_from_json(p.at("space"), ctx.spec_dir);
    out.result = describe_space(*art.space);
  } else if (object == "cone") {
    art.cone = cone_from_json(p);
    art.space = art.cone->space();
    out.result = {{"model", art.cone->model().kind_name()},
                  {"mesh", art.cone->model().mesh()},
                  {"mesh_points", art.cone->model().mesh_size()},
                  {"levels", art.cone->levels()},
                  {"points", art.space->size()},
                  {"eccentricity", art.space->eccentricity()}};
  } else if (object == "cone-covering") {
    if (!p.contains("model")) throw InputError("cone-covering needs a compact \"model\"");
    auto cov = std::make_shared<const ConeCovering>(make_cone_covering(
        model_from_json(p.at("model")), param(p, "cover_half_width", 4.0), param(p, "t_max", 8.0),
        param(p, "t_step", 0.25)));
    art.covering = cov;
    art.cone = cov->base;
    art.space = cov->cover->space();
    out.result = {{"base_model", cov->base->model().kind_name()},
                  {"cover_model", cov->cover->model().kind_name()},
                  {"base_points", cov->base->space()->size()},
                  {"cover_points", cov->cover->space()->size()},
                  {"levels", cov->cover->levels()},
                  {"generators", cov->action.generator_count()},
                  {"interior_points", std::count(cov->interior.begin(), cov->interior.end(), true)}};
  } else {
    throw InputError("unknown build object \"" + object + "\"");
  }
  ctx.artifacts[stage.at("name").get<std::string>()] = art;
  return out;
}

// ---------------------------------------------------------------------------
// certify

json soft_rows(const std::vector<SoftEntry>& rows) {
  json t = json::array();
  for (const auto& e : rows)
    t.push_back({{"R", e.R}, {"S", e.S}, {"x", e.x.index}, {"y", e.y.index}, {"x_prime", e.x_prime.index}});
  return t;
}

StageOutcome stage_certify(const json& stage, const json& p, Context& ctx) {
  StageOutcome out;
  const std::string check = param_str(p, "check", "");
  const std::string name = stage.at("name").get<std::string>();
  if (check == "cone-inequalities") {
    const ConePtr cone = cone_of(ctx, stage);
    const auto samples = static_cast<std::size_t>(param(p, "samples", 10000));
    const double tol = tolerance_of(ctx, p, 0.1);
    auto run = [&](const ConeSpace& c) {
      const auto r = check_cone_inequalities(c, samples, tol, ctx.seed);
      json j = to_json(r.cert);
      j["mesh"] = c.model().mesh();
      j["worst_ratio"] = {r.worst_ratio[0], r.worst_ratio[1], r.worst_ratio[2]};
      return std::make_pair(r, j);
    };
    auto [coarse_r, coarse_j] = run(*cone);
    out.verdict = coarse_r.cert.verdict;
    out.result["levels"] = json::array({coarse_j});
    if (p.value("refine", false)) {
      const auto fine = metric_cone(refined(cone->model()), cone->t_max(), cone->t_step());
      auto [fine_r, fine_j] = run(*fine);
      out.result["levels"].push_back(fine_j);
      // Excess over 1 of the worst ratio; refinement must not increase it.
      auto excess = [](const ConeInequalityReport& r) {
        return std::max({r.worst_ratio[0] - 1.0, r.worst_ratio[1] - 1.0, r.worst_ratio[2] - 1.0, 0.0});
      };
      const bool improves = excess(fine_r) <= excess(coarse_r) + 1e-12;
      out.result["worst_excess"] = {excess(coarse_r), excess(fine_r)};
      out.result["refinement_nonincreasing"] = improves;
      out.verdict = worst(out.verdict, fine_r.cert.verdict);
      if (!improves) out.verdict = Verdict::refuted;
    }
  } else if (check == "cat0-convexity") {
    const ManifoldModel m = p.contains("model") ? model_from_json(p.at("model"))
                                                : ManifoldModel::plane(8.0, 0.25);
    const auto r = check_cat0_convexity(m, static_cast<std::size_t>(param(p, "trials", 10000)), ctx.seed);
    out.verdict = r.cert.verdict;
    out.result = to_json(r.cert);
    out.result["worst_excess"] = r.worst_excess;
  } else if (check == "isometries") {
    ScanOptions so;
    so.seed = ctx.seed;
    so.threads = ctx.threads;
    const auto c = verify_isometries(covering_of(ctx, stage).action, so);
    out.verdict = c.verdict;
    out.result = to_json(c);
  } else if (check == "min-displacement") {
    const auto d = min_displacement(covering_of(ctx, stage).action,
                                    static_cast<int>(param(p, "word_radius", 4)));
    out.result = {{"value", d.value}, {"point", d.point.index}, {"element", to_json(d.element)},
                  {"free", d.free()}, {"fixed_points", d.fixed_points.size()}};
    out.verdict = d.free() ? Verdict::certified : Verdict::refuted;
  } else if (check == "uniform-discontinuity") {
    const auto& cov = covering_of(ctx, stage);
    const int wr = static_cast<int>(param(p, "word_radius", 4));
    const double C = min_displacement(cov.action, wr).value;
    json rows = json::array();
    for (double R : param_list(p, "radii", {1.0, 2.0, 4.0})) {
      const auto d = certify_uniform_coarse_discontinuity(cov.action, R, wr);
      const double bound = C > 0.0 ? R + R / C : std::numeric_limits<double>::infinity();
      const bool within = d.bad_points == 0 || d.max_bad_height <= bound + 1e-9;
      json row = to_json(d.cert);
      row["R"] = R;
      row["K"] = to_json(d.K);
      row["max_bad_height"] = d.max_bad_height;
      row["height_bound"] = bound;
      row["within_bound"] = within;
      rows.push_back(row);
      out.verdict = worst(out.verdict, d.cert.verdict);
      if (!within) out.verdict = Verdict::refuted;
    }
    out.result = {{"min_displacement", C}, {"rows", rows}};
  } else if (check == "scattered-fibres") {
    const auto& cov = covering_of(ctx, stage);
    json rows = json::array();
    for (double R : param_list(p, "radii", {1.0, 2.0, 4.0})) {
      const auto s = certify_scattered_fibres(cov.pi, R);
      json row = to_json(s.cert);
      row["R"] = R;
      row["K"] = to_json(s.K);
      rows.push_back(row);
      out.verdict = worst(out.verdict, s.cert.verdict);
    }
    out.result = {{"rows", rows}};
  } else if (check == "soft-quotient") {
    const auto& cov = covering_of(ctx, stage);
    const auto t = certify_soft_quotient(cov.pi, param_list(p, "radii", {1.0, 2.0, 4.0}), cov.interior,
                                         ctx.threads);
    out.result = {{"rows", soft_rows(t.rows)}, {"scanned_points", t.scanned_points},
                  {"excluded_points", t.excluded_points}};
  } else if (check == "lift-certificate") {
    const auto& cov = covering_of(ctx, stage);
    auto cert = std::make_shared<LiftCertificate>(build_lift_certificate(
        cov.pi, param_list(p, "soft_radii", {0.5, 1.0, 2.0, 4.0, 8.0}),
        param_list(p, "scatter_radii", {1.0, 2.0, 4.0, 8.0, 16.0}), cov.interior, ctx.threads));
    json scatter = json::array();
    for (const auto& s : cert->scatter) {
      json row = to_json(s.cert);
      row["R"] = s.R;
      row["K"] = to_json(s.K);
      scatter.push_back(row);
    }
    json prov = json::object();
    for (const auto& [k, v] : cert->provenance) prov[k] = v;
    out.result = {{"softness", soft_rows(cert->softness)}, {"scatter", scatter}, {"provenance", prov}};
    ctx.side_files.emplace_back(name + "-certificate.json", dump_report(out.result));
    Artifact art = use(ctx, stage, 0);
    art.certificate = cert;
    ctx.artifacts[name] = art;
  } else if (check == "control-profile") {
    const auto& cov = covering_of(ctx, stage);
    ScanOptions so;
    so.seed = ctx.seed;
    so.threads = ctx.threads;
    so.pair_budget = static_cast<std::uint64_t>(param(p, "pair_budget", 1e7));
    const auto prof = control_profile(cov.pi, param_list(p, "radii", {0.25, 0.5, 1.0, 2.0, 4.0}), so);
    out.result = to_json(prof);
    ctx.side_files.emplace_back(name + "-profile.csv", profile_csv(prof));
  } else {
    throw InputError("unknown certify check \"" + check + "\"");
  }
  return out;
}

// ---------------------------------------------------------------------------
// lift / correspond

StageOutcome stage_lift(const json& stage, const json& p, Context& ctx) {
  StageOutcome out;
  const auto& cov = covering_of(ctx, stage);
  const auto& cert = certificate_of(ctx, stage);
  const auto domain = cone_interval(param(p, "extent", 10.0), cov.base->t_step());
  const LoopMap alpha = winding_loop(domain, *cov.base, winding_of(p.value("winding", json::array({1}))));
  const RayMap bp = standard_cone_ray(*cov.cover, domain->ray());
  const Homotopy f = alpha.as_homotopy();
  const CoarseMap f0{f.cylinder->base(), cov.pi.source, bp.assignment, std::nullopt};
  LiftOptions lo;
  lo.threads = ctx.threads;
  const Homotopy lift_a = lift_homotopy(cov.pi, cert, f, f0, lo);
  lo.tie_break = TieBreak::largest_id;
  const Homotopy lift_b = lift_homotopy(cov.pi, cert, f, f0, lo);
  const LiftBounds bounds = lift_bounds(cov.pi, cert, f, f0, param(p, "pair_radius", 1.0));
  const Certification va = verify_lift(cov.pi, f, lift_a, f0, bounds);
  const Certification vb = verify_lift(cov.pi, f, lift_b, f0, bounds);
  const UniquenessDefect defect = uniqueness_defect(cov.pi, f, f0, lift_a, lift_b);
  const double defect_radius = defect.empty ? 0.0 : defect.ball.radius;
  const bool contained = defect_radius <= bounds.exceptional_radius + 1e-9;
  out.result = {{"loop", alpha.label},
                {"T", bounds.step.T},
                {"rho_step", bounds.step.rho},
                {"S", bounds.S},
                {"scatter_radius", bounds.scatter_radius},
                {"K", to_json(bounds.K)},
                {"exceptional_radius", bounds.exceptional_radius},
                {"verify_smallest_tie_break", to_json(va)},
                {"verify_largest_tie_break", to_json(vb)},
                {"defect", {{"empty", defect.empty},
                            {"radius", defect_radius},
                            {"disagreements", defect.disagreements.size()},
                            {"reaches_boundary", defect.reaches_boundary}}},
                {"defect_within_exceptional_region", contained}};
  out.verdict = worst(va.verdict, vb.verdict);
  if (!contained) out.verdict = Verdict::refuted;
  const std::size_t column = static_cast<std::size_t>(
      param(p, "trace_column", static_cast<double>(domain->columns() - 1)));
  ctx.side_files.emplace_back(stage.at("name").get<std::string>() + "-column.csv",
                              column_trace_csv(lift_a, PointId{std::min(column, domain->columns() - 1)}));
  return out;
}

StageOutcome stage_correspond(const json& stage, const json& p, Context& ctx) {
  StageOutcome out;
  const auto& cov = covering_of(ctx, stage);
  const auto& cert = certificate_of(ctx, stage);
  const auto domain = cone_interval(param(p, "extent", 10.0), cov.base->t_step());
  const RayMap bp = standard_cone_ray(*cov.cover, domain->ray());
  if (!p.contains("windings") || !p.at("windings").is_array())
    throw InputError("correspond needs a \"windings\" list");
  std::vector<LoopMap> loops;
  for (const auto& w : p.at("windings")) loops.push_back(winding_loop(domain, *cov.base, winding_of(w)));
  std::vector<SesProduct> products;
  if (p.contains("products"))
    for (const auto& pr : p.at("products")) {
      const auto a = pr.at(0).get<std::size_t>(), b = pr.at(1).get<std::size_t>();
      if (a >= loops.size() || b >= loops.size()) throw InputError("product index out of range");
      products.push_back({a, b, concatenate(loops[a], loops[b])});
    }
  const double horizon = param(p, "horizon", param(p, "extent", 10.0) / 2.0);
  LiftOptions lo;
  lo.threads = ctx.threads;
  SesReport rep;
  try {
    rep = verify_ses_instance(cov.action, cov.pi, cert, bp, loops, products, horizon,
                              static_cast<int>(param(p, "word_radius", 4)), lo);
  } catch (const RefutedError& e) {
    out.verdict = Verdict::refuted;
    out.result = {{"error", e.what()}, {"horizon", horizon}};
    return out;
  }
  json lj = json::array();
  for (const auto& l : rep.loops)
    lj.push_back({{"loop", l.label}, {"g", to_json(l.cls.g)}, {"t0", l.cls.t0},
                  {"candidates", l.cls.candidates}, {"closes_up", l.closes_up}});
  json pj = json::array();
  for (const auto& r : rep.products)
    pj.push_back({{"left", r.left}, {"right", r.right}, {"g", to_json(r.product_g)},
                  {"expected", to_json(r.expected)}, {"ok", r.ok}});
  out.result = {{"horizon", horizon}, {"loops", lj}, {"products", pj},
                {"homomorphism_ok", rep.homomorphism_ok}, {"kernel_ok", rep.kernel_ok}};
  if (!rep.homomorphism_ok || !rep.kernel_ok) out.verdict = Verdict::refuted;
  if (p.contains("expect")) {
    const auto& ex = p.at("expect");
    bool match = ex.is_array() && ex.size() == rep.loops.size();
    for (std::size_t i = 0; match && i < rep.loops.size(); ++i) {
      auto want = ex[i].get<std::vector<int>>();
      want.resize(rep.loops[i].cls.g.coords.size(), 0);
      match = want == rep.loops[i].cls.g.coords;
    }
    out.result["expectation_met"] = match;
    if (!match) out.verdict = Verdict::refuted;
  }
  return out;
}

// ---------------------------------------------------------------------------
// homotopy-check

/// A loop instance on a plane cone: level 1 + x/3, pushed off p by
/// min(t, x - t) / (3u) along the first axis.
LoopMap contraction_test_loop(const ConeIntervalPtr& domain, const ConeSpace& cone) {
  const double h = domain->step();
  RayMap base{domain->ray(), cone.space(), {}, std::nullopt};
  for (std::size_t i = 0; i < domain->columns(); ++i)
    base.assignment.push_back(cone.snap({0.0, 0.0}, 1.0 + static_cast<double>(i) * h / 3.0));
  return loop_from(domain, base, "bump", [&](std::size_t i, std::size_t k) {
    const double x = static_cast<double>(i) * h, t = static_cast<double>(k) * h;
    const double u = 1.0 + x / 3.0;
    return cone.snap({std::min(t, x - t) / (3.0 * u), 0.0}, u);
  });
}

StageOutcome stage_homotopy(const json& /*stage*/, const json& p, Context& ctx) {
  StageOutcome out;
  const std::string check = param_str(p, "check", "");
  if (check == "boundary-fix") {
    const auto domain = cone_interval(param(p, "extent", 10.0), param(p, "step", 1.0));
    const auto cyl = boundary_fix_cylinder(*domain);
    Homotopy H{cyl, CoarseMap{cyl->space(), domain->space(), {}, std::nullopt}};
    H.map.assignment.assign(cyl->space()->size(), PointId{});
    for (std::size_t i = 0; i < domain->columns(); ++i)
      for (std::size_t k = 0; k <= i; ++k)
        for (std::size_t j = 0; j <= i; ++j)
          H.map.assignment[cyl->at(domain->at(i, k), j).index] =
              domain->at(i, std::min(i, j + std::min(k, i - k)));
    RayMap b{domain->ray(), domain->space(), {}, std::nullopt};
    for (std::size_t i = 0; i < domain->columns(); ++i) b.assignment.push_back(domain->at(i, 0));
    const BoundaryFix fix(H, domain, b);
    const Homotopy hp = fix.build();
    const auto r = check_boundary_fix(fix, hp, *domain, b);
    out.verdict = r.cert.verdict;
    out.result = to_json(r.cert);
  } else if (check == "reparametrization") {
    LevelLipschitzProfile prof;
    const double extent = param(p, "extent", 40.0);
    if (p.contains("L")) {
      prof.L = p.at("L").get<std::vector<double>>();
    } else {
      for (int K = 0; K <= static_cast<int>(extent) + 2; ++K) prof.L.push_back(std::max(1, K));
    }
    const auto rep = reparametrize_to_lipschitz(prof, extent);
    const auto r = check_composite_lipschitz(
        rep,
        [](double x, double t) { return std::array<double, 2>{x * x / 2.0, t * t / 2.0}; },
        extent, param(p, "step", 0.25), static_cast<std::size_t>(param(p, "random_pairs", 10000)),
        tolerance_of(ctx, p, 0.05), ctx.seed);
    out.verdict = r.cert.verdict;
    out.result = to_json(r.cert);
    out.result["breakpoints"] = rep.breakpoints;
  } else if (check == "contraction") {
    const double extent = param(p, "extent", 16.0);
    const double tol = tolerance_of(ctx, p, 0.15);
    const auto samples = static_cast<std::size_t>(param(p, "samples", 1000));
    std::vector<double> meshes{param(p, "mesh", 0.25)};
    if (p.value("refine", false)) meshes.push_back(meshes[0] / 2.0);
    json levels = json::array();
    std::vector<double> proof_worst;
    for (double h : meshes) {
      const auto cone = metric_cone(ManifoldModel::plane(param(p, "half_width", 1.0), h),
                                    1.0 + extent / 3.0 + h, h);
      const auto domain = cone_interval(extent, h);
      const auto c = contraction_homotopy(contraction_test_loop(domain, *cone), cone, {0.0, 0.0});
      const auto b = check_contraction_bounds(c, samples, tol, ctx.seed);
      json j = to_json(b.cert);
      j["mesh"] = h;
      bool on_p = true;
      for (const auto& v : c.beta_prime.assignment) on_p = on_p && cone->model_point(v) == ModelPoint{0.0, 0.0};
      j["terminal_on_p"] = on_p;
      levels.push_back(j);
      proof_worst.push_back(*std::max_element(b.worst_ratio.begin(), b.worst_ratio.begin() + 3));
      out.verdict = worst(out.verdict, b.cert.verdict);
      if (!on_p) out.verdict = Verdict::refuted;
    }
    out.result = {{"levels", levels}};
    if (proof_worst.size() == 2) {
      const bool dec = proof_worst[1] < proof_worst[0];
      out.result["refinement_nonincreasing"] = dec;
      if (!dec) out.verdict = Verdict::refuted;
    }
  } else {
    throw InputError("unknown homotopy check \"" + check + "\"");
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------

void validate_experiment(const json& spec) {
  if (!spec.is_object()) throw InputError("experiment spec must be a JSON object");
  if (!spec.contains("name") || !spec.at("name").is_string())
    throw InputError("experiment spec needs a \"name\" string");
  if (spec.contains("seed") &&
      !(spec.at("seed").is_number_unsigned() ||
        (spec.at("seed").is_number_integer() && spec.at("seed").get<std::int64_t>() >= 0)))
    throw InputError("\"seed\" must be a nonnegative integer");
  if (!spec.contains("stages") || !spec.at("stages").is_array() || spec.at("stages").empty())
    throw InputError("experiment spec needs a nonempty \"stages\" list");
  static const std::set<std::string> kinds{"build", "certify", "lift", "correspond", "homotopy-check"};
  std::set<std::string> seen;
  for (const auto& st : spec.at("stages")) {
    if (!st.is_object() || !st.contains("name") || !st.at("name").is_string())
      throw InputError("every stage needs a \"name\"");
    const std::string name = st.at("name").get<std::string>();
    if (!st.contains("kind") || !st.at("kind").is_string() || !kinds.count(st.at("kind").get<std::string>()))
      throw InputError("stage \"" + name + "\" has an unknown \"kind\"");
    if (st.contains("params") && !st.at("params").is_object())
      throw InputError("stage \"" + name + "\": \"params\" must be an object");
    for (const auto& u : uses_of(st))
      if (!seen.count(u))
        throw InputError("stage \"" + name + "\" uses \"" + u + "\" before it is produced");
    if (!seen.insert(name).second) throw InputError("duplicate stage name \"" + name + "\"");
  }
}

RunResult run_experiment(const json& spec, const RunOptions& opts) {
  RunResult rr;
  Context ctx;
  ctx.threads = opts.threads;
  ctx.tolerance = opts.tolerance;
  ctx.spec_dir = opts.spec_dir;
  json& rep = rr.report;
  rep["toolkit"] = {{"name", "coarsekit"}, {"version", kVersion}};
  try {
    validate_experiment(spec);
  } catch (const InputError& e) {
    rep["status"] = "error";
    rep["error"] = e.what();
    rr.exit_code = kExitInput;
    return rr;
  }
  ctx.seed = opts.seed ? *opts.seed : spec.value("seed", std::uint64_t{0});
  rep["experiment"] = spec.at("name");
  rep["seed"] = ctx.seed;
  if (opts.tolerance) rep["tolerance_override"] = *opts.tolerance;
  rep["spec"] = spec;
  rep["stages"] = json::array();
  bool refuted = false;
  for (const auto& st : spec.at("stages")) {
    const std::string name = st.at("name").get<std::string>();
    const std::string kind = st.at("kind").get<std::string>();
    const json params = st.value("params", json::object());
    const bool expect_refute = st.value("expect_refute", false);
    json entry{{"name", name}, {"kind", kind}};
    const auto t_begin = std::chrono::steady_clock::now();
    try {
      StageOutcome o;
      if (kind == "build") o = stage_build(st, params, ctx);
      else if (kind == "certify") o = stage_certify(st, params, ctx);
      else if (kind == "lift") o = stage_lift(st, params, ctx);
      else if (kind == "correspond") o = stage_correspond(st, params, ctx);
      else o = stage_homotopy(st, params, ctx);
      entry["verdict"] = certification_verdict(o.verdict);
      const bool was_refuted = o.verdict == Verdict::refuted;
      if (expect_refute) {
        entry["expect_refute"] = true;
        entry["status"] = was_refuted ? "refuted-as-expected" : "expected-refutation-missing";
        if (!was_refuted) refuted = true;
      } else {
        entry["status"] = was_refuted ? "refuted" : "ok";
        if (was_refuted) refuted = true;
      }
      entry["result"] = o.result;
    } catch (const StuckLiftError& e) {
      entry["status"] = "stuck-lift";
      entry["error"] = e.what();
      entry["stuck"] = {{"column", e.column()}, {"t", e.t()}};
      rep["stages"].push_back(entry);
      rep["status"] = "error";
      rep["error"] = "stage \"" + name + "\": " + e.what();
      rr.exit_code = kExitStuckLift;
      return rr;
    } catch (const RefutedError& e) {
      entry["verdict"] = "refuted";
      entry["status"] = expect_refute ? "refuted-as-expected" : "refuted";
      entry["result"] = {{"witness_note", e.what()}};
      if (!expect_refute) refuted = true;
    } catch (const std::exception& e) {
      entry["status"] = "error";
      entry["error"] = e.what();
      rep["stages"].push_back(entry);
      rep["status"] = "error";
      rep["error"] = "stage \"" + name + "\": " + e.what();
      rr.exit_code = kExitInput;
      return rr;
    }
    rr.timings[name] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_begin).count();
    rep["stages"].push_back(entry);
  }
  rep["status"] = refuted ? "refuted" : "ok";
  rr.exit_code = refuted ? kExitRefuted : kExitOk;
  rr.side_files = std::move(ctx.side_files);
  return rr;
}

RunResult run_experiment_file(const std::string& path, RunOptions opts) {
  json spec;
  try {
    spec = parse_json(read_file(path), path);
  } catch (const InputError& e) {
    RunResult rr;
    rr.report = {{"toolkit", {{"name", "coarsekit"}, {"version", kVersion}}},
                 {"status", "error"},
                 {"error", e.what()}};
    rr.exit_code = kExitInput;
    return rr;
  }
  const fs::path parent = fs::path(path).parent_path();
  opts.spec_dir = parent.empty() ? "." : parent.string();
  return run_experiment(spec, opts);
}

json verb_to_experiment(const std::string& verb, const json& params) {
  if (!params.is_object()) throw InputError("verb parameters must be a JSON object");
  auto stage = [](const std::string& name, const std::string& kind, json p, json uses = nullptr) {
    json s{{"name", name}, {"kind", kind}};
    if (!uses.is_null()) s["uses"] = uses;
    s["params"] = std::move(p);
    return s;
  };
  auto build_part = [&](const char* object) {
    if (!params.contains("build")) throw InputError(std::string("\"") + verb + "\" needs a \"build\" section");
    json b = params.at("build");
    if (!b.contains("object")) b["object"] = object;
    return b;
  };
  auto rest = [&]() {
    json r = params;
    r.erase("build");
    r.erase("certificate");
    return r;
  };
  json stages = json::array();
  if (verb == "build-space") {
    stages.push_back(stage("space", "build", {{"object", "space"}, {"space", params}}));
  } else if (verb == "cone") {
    json b = params;
    b["object"] = "cone";
    stages.push_back(stage("cone", "build", b));
  } else if (verb == "quotient") {
    json b = params;
    b["object"] = "cone-covering";
    stages.push_back(stage("covering", "build", b));
    stages.push_back(stage("isometries", "certify", {{"check", "isometries"}}, "covering"));
    stages.push_back(stage("displacement", "certify", {{"check", "min-displacement"}}, "covering"));
  } else if (verb == "certify") {
    stages.push_back(stage("input", "build", build_part("cone-covering")));
    stages.push_back(stage("certify", "certify", rest(), "input"));
  } else if (verb == "lift" || verb == "correspond") {
    stages.push_back(stage("covering", "build", build_part("cone-covering")));
    json c = params.value("certificate", json::object());
    c["check"] = "lift-certificate";
    stages.push_back(stage("certificate", "certify", c, "covering"));
    stages.push_back(stage(verb, verb, rest(), json::array({"covering", "certificate"})));
  } else if (verb == "homotopy") {
    stages.push_back(stage("homotopy", "homotopy-check", params));
  } else {
    throw InputError("unknown verb \"" + verb + "\"");
  }
  return json{{"name", verb}, {"seed", params.value("seed", std::uint64_t{0})}, {"stages", stages}};
}

void write_run(const RunResult& result, const std::string& out_dir) {
  const fs::path dir(out_dir);
  for (const auto& [name, content] : result.side_files) write_file_atomic((dir / name).string(), content);
  write_file_atomic((dir / "timings.json").string(), dump_report(result.timings));
  write_file_atomic((dir / "report.json").string(), dump_report(result.report));
}

std::string describe_artifact(const std::string& path) {
  const std::string text = read_file(path);
  std::ostringstream os;
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string::npos || (text[first] != '{' && text[first] != '[')) {
    const auto edges = parse_edge_list(text);
    std::size_t n = 0;
    for (const auto& e : edges) n = std::max({n, e.a + 1, e.b + 1});
    const auto s = build_graph_space(n, edges, PointId{0});
    os << "edge list " << path << "\n  points: " << s->size() << "\n  edges: " << edges.size()
       << "\n  diameter: " << fmt(s->diameter()) << "\n";
    return os.str();
  }
  const json j = parse_json(text, path);
  if (j.contains("type")) {
    const fs::path parent = fs::path(path).parent_path();
    const auto s = space_from_json(j, parent.empty() ? "." : parent.string());
    os << "space " << path << " (" << to_string(s->kind()) << ")\n  points: " << s->size()
       << "\n  diameter: " << fmt(s->diameter()) << "\n  basepoint eccentricity: "
       << fmt(s->eccentricity()) << "\n";
  } else if (j.contains("softness")) {
    os << "lift certificate " << path << "\n  R            S(R)\n";
    for (const auto& r : j.at("softness")) {
      char buf[80];
      std::snprintf(buf, sizeof buf, "  %-12s %s\n", fmt(r.at("R").get<double>()).c_str(),
                    fmt(r.at("S").get<double>()).c_str());
      os << buf;
    }
    os << "  R            K(R) radius    verdict\n";
    for (const auto& r : j.at("scatter")) {
      const auto& k = r.at("K");
      const std::string rad = k.value("empty", false) ? "empty" : fmt(k.at("radius").get<double>());
      char buf[100];
      std::snprintf(buf, sizeof buf, "  %-12s %-14s %s\n", fmt(r.at("R").get<double>()).c_str(),
                    rad.c_str(), r.at("verdict").get<std::string>().c_str());
      os << buf;
    }
  } else if (j.contains("stages") && j.contains("status")) {
    os << "report " << path << "\n  experiment: " << j.value("experiment", std::string("?"))
       << "\n  status: " << j.at("status").get<std::string>() << "\n  seed: " << j.value("seed", 0)
       << "\n";
    for (const auto& s : j.at("stages"))
      os << "  - " << s.value("name", std::string("?")) << " [" << s.value("kind", std::string("?"))
         << "] " << s.value("status", std::string("?")) << "\n";
    if (j.contains("error")) os << "  error: " << j.at("error").get<std::string>() << "\n";
  } else if (j.contains("stages")) {
    validate_experiment(j);
    os << "experiment spec " << path << "\n  name: " << j.at("name").get<std::string>() << "\n";
    for (const auto& s : j.at("stages"))
      os << "  - " << s.at("name").get<std::string>() << " [" << s.at("kind").get<std::string>() << "]\n";
  } else {
    throw InputError("unrecognized artifact " + path);
  }
  return os.str();
}

}  // namespace coarsekit
