// Copyright 2026 The coarsekit Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "coarsekit/errors.hpp"
#include "coarsekit/group_quotient.hpp"
#include "oracles.hpp"

namespace coarsekit {
namespace {

// Dense distances on the cone over a line segment with `m` mesh points of
// spacing h and `levels` levels 1, 1 + dt, ...
std::vector<double> line_cone_distances(std::size_t m, double h, std::size_t levels, double dt) {
  std::vector<oracle::Edge> edges;
  auto id = [&](std::size_t a, std::size_t k) { return a * levels + k; };
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t k = 0; k < levels; ++k) {
      if (k + 1 < levels) edges.push_back({id(a, k), id(a, k + 1), dt});
      if (a + 1 < m) edges.push_back({id(a, k), id(a + 1, k), (1.0 + double(k) * dt) * h});
    }
  return oracle::floyd_warshall(m * levels, edges);
}

TEST(GroupAction, LatticeElementsMatchTheL1Ball) {
  const auto s = build_grid_space(2, 4.0, 1.0);
  const auto act = GroupAction::lattice(s, {{1.0, 0.0}, {0.0, 1.0}});
  for (int r = 0; r <= 3; ++r) {
    std::set<std::vector<int>> got, want;
    for (const auto& g : act.elements(r)) got.insert(g.coords);
    for (const auto& v : oracle::lattice_ball(2, r)) want.insert(v);
    EXPECT_EQ(got, want) << r;
  }
  EXPECT_TRUE(act.elements(2).front().is_identity());
}

TEST(GroupAction, LatticeApplyTranslatesAndLeavesTheBox) {
  const auto s = build_grid_space(1, 4.0, 1.0);
  const auto act = GroupAction::lattice(s, {{2.0}});
  EXPECT_EQ(act.apply(act.generator(0), PointId{1}), PointId{3});
  EXPECT_FALSE(act.apply(act.generator(0), PointId{3}).has_value());
  const GroupElement back = act.inverse(act.generator(0));
  EXPECT_EQ(act.apply(back, PointId{4}), PointId{2});
  EXPECT_EQ(act.compose(act.generator(0), back), act.identity());
}

TEST(GroupAction, FiniteClosureOfACycle) {
  const auto s = build_graph_space(4, {{0, 1, 1}, {1, 2, 1}, {2, 3, 1}, {3, 0, 1}}, PointId{0});
  const auto act = GroupAction::finite(s, {{1, 2, 3, 0}});
  EXPECT_EQ(act.finite_order(), 4u);
  EXPECT_TRUE(verify_isometries(act).certified());
  const auto bad = GroupAction::finite(s, {{1, 0, 2, 3}});
  const auto c = verify_isometries(bad);
  EXPECT_EQ(c.verdict, Verdict::refuted);
  EXPECT_EQ(c.witness.size(), 2u);
  EXPECT_THROW(GroupAction::finite(s, {{0, 0, 1, 2}}), InputError);
}

TEST(Quotient, LineModTranslationIsTheCircle) {
  const double h = 0.25, L = 1.0;
  const auto s = build_grid_space(1, 4.0, h);  // [0, 4]
  const auto act = GroupAction::lattice(s, {{L}});
  const auto q = quotient_space(act, 8);
  ASSERT_EQ(q.space->size(), 4u);
  for (std::size_t a = 0; a < s->size(); ++a)
    for (std::size_t b = 0; b < s->size(); ++b) {
      const double want = oracle::circle_gap(double(a) * h, double(b) * h, L);
      EXPECT_NEAR(q.space->distance(q.q(PointId{a}), q.q(PointId{b})), want, 1e-12);
    }
}

TEST(Quotient, OrbitEscapingTheHorizonIsRefuted) {
  const auto s = build_grid_space(1, 8.0, 1.0);
  const auto act = GroupAction::lattice(s, {{1.0}});
  EXPECT_THROW(quotient_space(act, 2), RefutedError);
}

TEST(Displacement, CoverConeTranslationMovesByTheLevel) {
  const auto cov = make_cone_covering(ManifoldModel::circle(1.0, 0.25), 2.0, 3.0, 0.5);
  const auto d = min_displacement(cov.action, 2);
  EXPECT_TRUE(d.free());
  // A unit translation at level t costs t, smallest at t = 1.
  EXPECT_DOUBLE_EQ(d.value, 1.0);
  EXPECT_DOUBLE_EQ(cov.cover->t(d.point), 1.0);
}

TEST(Discontinuity, BadPointsAreTheLowLevels) {
  const auto cov = make_cone_covering(ManifoldModel::circle(1.0, 0.25), 2.0, 4.0, 0.5);
  const std::size_t m = cov.cover->model().mesh_size(), levels = cov.cover->levels();
  const auto d = line_cone_distances(m, 0.25, levels, 0.5);
  const std::size_t N = m * levels;
  for (double R : {1.0, 2.0, 3.0}) {
    // A point is bad when a unit translate within the cover lies within R.
    std::size_t bad = 0;
    double height = 0.0;
    for (std::size_t a = 0; a < m; ++a)
      for (std::size_t k = 0; k < levels; ++k) {
        bool is_bad = false;
        for (int shift : {-8, -4, 4, 8}) {  // +-1 and +-2 in mesh steps of 0.25
          const long b = long(a) + shift;
          if (b < 0 || b >= long(m)) continue;
          if (d[(a * levels + k) * N + std::size_t(b) * levels + k] <= R) is_bad = true;
        }
        if (is_bad) ++bad, height = std::max(height, 1.0 + double(k) * 0.5);
      }
    const auto c = certify_uniform_coarse_discontinuity(cov.action, R, 2);
    EXPECT_EQ(c.bad_points, bad) << R;
    EXPECT_DOUBLE_EQ(c.max_bad_height, height) << R;
    EXPECT_LE(c.max_bad_height, R + R / 1.0);
    EXPECT_TRUE(c.cert.certified());
  }
}

TEST(SoftQuotient, MatchesBruteForceOverTheInterior) {
  const auto cov = make_cone_covering(ManifoldModel::circle(1.0, 0.25), 2.0, 3.0, 0.5);
  const std::size_t m = cov.cover->model().mesh_size(), levels = cov.cover->levels();
  const std::size_t N = m * levels, nb = 4 * levels;
  const auto dc = line_cone_distances(m, 0.25, levels, 0.5);
  const auto db = oracle::circle_cone_distances(4, 0.25, levels, 0.5);
  const std::vector<double> radii{0.5, 1.0, 2.0};
  const auto table = certify_soft_quotient(cov.pi, radii, cov.interior);
  for (std::size_t r = 0; r < radii.size(); ++r) {
    double S = 0.0;
    for (std::size_t x = 0; x < N; ++x) {
      if (!cov.interior[x]) continue;
      const std::size_t px = cov.pi(PointId{x}).index;
      for (std::size_t y = 0; y < nb; ++y) {
        if (db[px * nb + y] > radii[r]) continue;
        double best = oracle::kInf;
        for (std::size_t xp = 0; xp < N; ++xp)
          if (cov.pi(PointId{xp}).index == y) best = std::min(best, dc[x * N + xp]);
        S = std::max(S, best);
      }
    }
    EXPECT_NEAR(table.rows[r].S, S, 1e-12) << radii[r];
  }
}

TEST(SoftQuotient, NonSurjectiveMapIsRefuted) {
  const auto s = build_grid_space(1, 2.0, 1.0);
  EXPECT_THROW(certify_soft_quotient(constant_map(s, s, PointId{0}), {1.0}), RefutedError);
}

TEST(ScatteredFibres, FibresSeparateAwayFromTheApex) {
  const auto cov = make_cone_covering(ManifoldModel::circle(1.0, 0.25), 2.0, 4.0, 0.5);
  for (double R : {1.0, 2.0}) {
    const auto sc = certify_scattered_fibres(cov.pi, R);
    EXPECT_TRUE(sc.cert.certified()) << R;
    // Distinct fibre points at level t are at least t apart, so nothing above
    // level R can be close to another point of its fibre.
    EXPECT_LE(sc.max_bad_height, R + 1e-12);
  }
}

TEST(LiftCertificate, LookupsUseTheNextRadius) {
  const auto cov = make_cone_covering(ManifoldModel::circle(1.0, 0.25), 2.0, 3.0, 0.5);
  const auto cert = build_lift_certificate(cov.pi, {1.0, 0.5}, {2.0, 1.0}, cov.interior);
  EXPECT_EQ(cert.softness.front().R, 0.5);
  EXPECT_EQ(cert.softness_at(0.7), cert.softness[1].S);
  EXPECT_EQ(cert.scatter_at(1.5).R, 2.0);
  EXPECT_THROW(cert.softness_at(4.0), InputError);
}

TEST(Saturation, SaturatedBallIsTheUnionOfTranslates) {
  const auto s = build_grid_space(1, 8.0, 1.0);
  const auto act = GroupAction::lattice(s, {{4.0}});
  const auto k = BoundedSet::around(*s, PointId{0}, 1.0);
  const auto sat = saturate(act, k, 2);
  // The ball {0, 1} and its translates by 4 and 8, cut off at the box edge.
  const std::vector<PointId> want{PointId{0}, PointId{1}, PointId{4}, PointId{5}, PointId{8}};
  EXPECT_EQ(sat, want);
  EXPECT_DOUBLE_EQ(saturation_radius(act, k, 2), 8.0);
}

}  // namespace
}  // namespace coarsekit
