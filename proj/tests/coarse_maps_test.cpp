// Copyright 2026 The coarsekit Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>

#include "coarsekit/coarse_maps.hpp"
#include "coarsekit/errors.hpp"

namespace coarsekit {
namespace {

// Squares a 1-D grid coordinate and snaps onto a finer target grid.
CoarseMap square_map(const SpacePtr& src, const SpacePtr& tgt) {
  CoarseMap f{src, tgt, {}, std::nullopt};
  for (std::size_t i = 0; i < src->size(); ++i) {
    const double x = src->coords(PointId{i})[0];
    f.assignment.push_back(*tgt->find(std::vector<double>{x * x}));
  }
  return f;
}

TEST(ControlProfile, MatchesBruteForceSupremum) {
  const auto src = build_grid_space(1, 4.0, 1.0);
  const auto tgt = build_grid_space(1, 16.0, 1.0);
  const auto f = square_map(src, tgt);
  const std::vector<double> radii{1.0, 2.0, 4.0};
  const auto prof = control_profile(f, radii);
  for (std::size_t r = 0; r < radii.size(); ++r) {
    double sup = 0.0;
    for (int a = 0; a <= 4; ++a)
      for (int b = 0; b <= 4; ++b)
        if (std::abs(a - b) <= radii[r]) sup = std::max(sup, std::abs(double(a * a - b * b)));
    EXPECT_DOUBLE_EQ(prof.bounds[r], sup) << radii[r];
  }
  EXPECT_EQ(prof.pairs_scanned, 10u);
  EXPECT_FALSE(prof.subsampled);
}

TEST(ControlProfile, LookupUsesNextTabulatedRadius) {
  ControlProfile p{{1.0, 2.0}, {3.0, 5.0}, 0, false};
  EXPECT_EQ(p.at(0.5), 3.0);
  EXPECT_EQ(p.at(1.0), 3.0);
  EXPECT_EQ(p.at(1.5), 5.0);
  EXPECT_TRUE(std::isinf(p.at(2.5)));
}

TEST(ControlProfile, RejectsBadRadii) {
  const auto s = build_grid_space(1, 2.0, 1.0);
  const auto id = identity_map(s);
  EXPECT_THROW(control_profile(id, {}), InputError);
  EXPECT_THROW(control_profile(id, {2.0, 1.0}), InputError);
  EXPECT_THROW(control_profile(id, {0.0}), InputError);
}

TEST(ControlProfile, SubsamplesPastBudgetDeterministically) {
  const auto s = build_grid_space(1, 40.0, 1.0);
  const auto id = identity_map(s);
  ScanOptions o;
  o.pair_budget = 100;
  o.seed = 3;
  const auto a = control_profile(id, {1.0, 8.0}, o);
  const auto b = control_profile(id, {1.0, 8.0}, o);
  EXPECT_TRUE(a.subsampled);
  EXPECT_EQ(a.bounds, b.bounds);
  EXPECT_LE(a.bounds[1], 8.0);
}

TEST(Compose, AppliesRightThenLeft) {
  const auto s = build_grid_space(1, 3.0, 1.0);
  CoarseMap shift{s, s, {PointId{1}, PointId{2}, PointId{3}, PointId{3}}, std::nullopt};
  const auto c = constant_map(s, s, PointId{0});
  EXPECT_EQ(compose(shift, c)(PointId{2}), PointId{1});
  EXPECT_EQ(compose(shift, shift)(PointId{0}), PointId{2});
}

TEST(Closeness, ReportsSupremumGapAndWitness) {
  const auto s = build_grid_space(1, 8.0, 1.0);
  const auto id = identity_map(s);
  CoarseMap shifted = id;
  for (std::size_t i = 0; i + 2 < s->size(); ++i) shifted.assignment[i] = PointId{i + 2};
  const auto c = closeness(id, shifted);
  EXPECT_DOUBLE_EQ(c.value, 2.0);
  EXPECT_EQ(c.witness, PointId{0});
  EXPECT_FALSE(c.unbounded_trend);
}

TEST(Closeness, GrowingGapReadsUnbounded) {
  const auto s = build_grid_space(1, 16.0, 1.0);
  const auto zero = constant_map(s, s, PointId{0});
  const auto c = closeness(identity_map(s), zero);
  EXPECT_DOUBLE_EQ(c.value, 16.0);
  EXPECT_TRUE(c.unbounded_trend);
}

TEST(CertifyCoarse, IdentityIsCoarseAndCollapseIsNot) {
  const auto s = build_grid_space(1, 16.0, 1.0);
  EXPECT_TRUE(certify_coarse(identity_map(s), {2.0, 4.0, 8.0}).certified());
  const auto collapse = constant_map(s, s, PointId{0});
  const auto c = certify_coarse(collapse, {2.0, 4.0, 8.0});
  EXPECT_EQ(c.verdict, Verdict::refuted);
  EXPECT_FALSE(c.witness.empty());
}

TEST(ProfileCsv, HasHeaderAndRows) {
  ControlProfile p{{1.0, 2.5}, {3.0, 5.0}, 0, false};
  EXPECT_EQ(profile_csv(p), "radius,bound\n1,3\n2.5,5\n");
}

TEST(CoarseMap, ValidateRejectsPartialMaps) {
  const auto s = build_grid_space(1, 2.0, 1.0);
  CoarseMap f{s, s, {PointId{0}}, std::nullopt};
  EXPECT_THROW(f.validate(), InputError);
  f.assignment = {PointId{0}, PointId{1}, PointId{7}};
  EXPECT_THROW(f.validate(), InputError);
}

}  // namespace
}  // namespace coarsekit
