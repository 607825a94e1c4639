// Copyright 2026 The coarsekit Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>

#include "coarsekit/errors.hpp"
#include "coarsekit/homotopy_lab.hpp"
#include "coarsekit/lifting.hpp"
#include "oracles.hpp"

namespace coarsekit {
namespace {

struct CircleSetup {
  ConeCovering cov;
  LiftCertificate cert;
  ConeIntervalPtr domain;
  RayMap base_lift;
};

const CircleSetup& circle_setup() {
  static const CircleSetup s = [] {
    auto cov = make_cone_covering(ManifoldModel::circle(1.0, 0.125), 3.0, 7.0, 0.25);
    auto cert = build_lift_certificate(cov.pi, {0.5, 1.0, 2.0, 4.0}, {1.0, 2.0, 4.0, 8.0, 16.0},
                                       cov.interior);
    auto domain = cone_interval(6.0, 0.25);
    auto bp = standard_cone_ray(*cov.cover, domain->ray());
    return CircleSetup{std::move(cov), std::move(cert), domain, std::move(bp)};
  }();
  return s;
}

// Winding of the downstairs loop along column i, read from the circle angle
// at every cell of the column and unwrapped.
double column_turns(const ConeSpace& base, const LoopMap& alpha, std::size_t i) {
  std::vector<double> angles;
  for (std::size_t k = 0; k <= i; ++k)
    angles.push_back(base.model_point(alpha.map(alpha.domain->at(i, k)))[0] / base.model().periods()[0]);
  return oracle::unwrapped_turns(angles);
}

TEST(Lift, CommutesStartsRightAndTakesBoundedSteps) {
  const auto& s = circle_setup();
  const LoopMap alpha = winding_loop(s.domain, *s.cov.base, {1, 0});
  const Homotopy f = alpha.as_homotopy();
  const CoarseMap f0{f.cylinder->base(), s.cov.pi.source, s.base_lift.assignment, std::nullopt};
  const Homotopy lift = lift_homotopy(s.cov.pi, s.cert, f, f0);
  const StepBound step = lift_step_bound(s.cert, f);
  const auto& cyl = *f.cylinder;
  const auto& cover = *s.cov.cover->space();
  for (std::size_t x = 0; x < cyl.base()->size(); ++x) {
    EXPECT_EQ(lift.map(cyl.i0(PointId{x})), f0(PointId{x}));
    for (std::size_t k = 0; k < cyl.column_size(PointId{x}); ++k) {
      const PointId p = cyl.at(PointId{x}, k);
      EXPECT_EQ(s.cov.pi(lift.map(p)), f.map(p));
      if (k > 0) EXPECT_LE(cover.distance(lift.map(cyl.at(PointId{x}, k - 1)), lift.map(p)), step.T);
    }
  }
}

TEST(Lift, EndpointDisplacementMatchesFibreTracking) {
  const auto& s = circle_setup();
  for (int w : {-2, -1, 0, 1, 2}) {
    const LoopMap alpha = winding_loop(s.domain, *s.cov.base, {w, 0});
    const RayMap end = lifting_correspondence(s.cov.pi, s.cert, alpha, s.base_lift);
    const std::size_t last = s.domain->columns() - 1;
    const double turns = column_turns(*s.cov.base, alpha, last);
    const double shift = s.cov.cover->model_point(end.assignment[last])[0] -
                         s.cov.cover->model_point(s.base_lift.assignment[last])[0];
    EXPECT_NEAR(turns, double(w), 1e-9) << w;
    EXPECT_NEAR(shift, std::round(turns), 1e-12) << w;
  }
}

TEST(Lift, ClassificationAgreesWithTheOracle) {
  const auto& s = circle_setup();
  for (int w : {-2, -1, 0, 1, 2}) {
    const LoopMap alpha = winding_loop(s.domain, *s.cov.base, {w, 0});
    const RayMap end = lifting_correspondence(s.cov.pi, s.cert, alpha, s.base_lift);
    const auto cls = classify_lift(s.cov.action, s.cov.pi, s.base_lift, end, 3.0, 4);
    const double turns = column_turns(*s.cov.base, alpha, s.domain->columns() - 1);
    EXPECT_EQ(cls.g.coords, std::vector<int>{int(std::lround(turns))}) << w;
    EXPECT_LE(cls.t0, 3.0);
  }
}

TEST(Lift, TieBreaksDisagreeOnlyNearTheApex) {
  const auto& s = circle_setup();
  const LoopMap alpha = winding_loop(s.domain, *s.cov.base, {1, 0});
  const Homotopy f = alpha.as_homotopy();
  const CoarseMap f0{f.cylinder->base(), s.cov.pi.source, s.base_lift.assignment, std::nullopt};
  LiftOptions lo;
  const Homotopy a = lift_homotopy(s.cov.pi, s.cert, f, f0, lo);
  lo.tie_break = TieBreak::largest_id;
  const Homotopy b = lift_homotopy(s.cov.pi, s.cert, f, f0, lo);
  const LiftBounds bounds = lift_bounds(s.cov.pi, s.cert, f, f0);
  EXPECT_TRUE(verify_lift(s.cov.pi, f, a, f0, bounds).certified());
  EXPECT_TRUE(verify_lift(s.cov.pi, f, b, f0, bounds).certified());
  const auto defect = uniqueness_defect(s.cov.pi, f, f0, a, b);
  if (!defect.empty) EXPECT_LE(defect.ball.radius, bounds.exceptional_radius);
  for (PointId p : defect.disagreements) EXPECT_TRUE(defect.ball.contains(p));
}

TEST(Lift, WrongInitialConditionIsAnInputError) {
  const auto& s = circle_setup();
  const LoopMap alpha = winding_loop(s.domain, *s.cov.base, {1, 0});
  const Homotopy f = alpha.as_homotopy();
  CoarseMap f0{f.cylinder->base(), s.cov.pi.source, s.base_lift.assignment, std::nullopt};
  // Move one column to a point over a different base point.
  f0.assignment[3] = s.cov.cover->vertex(s.cov.cover->split(f0.assignment[3]).first + 1,
                                          s.cov.cover->split(f0.assignment[3]).second);
  EXPECT_THROW(lift_homotopy(s.cov.pi, s.cert, f, f0), InputError);
}

TEST(Lift, RunningOffTheCoverIsStuck) {
  auto cov = make_cone_covering(ManifoldModel::circle(1.0, 0.25), 1.0, 5.0, 0.25);
  auto cert = build_lift_certificate(cov.pi, {0.5, 1.0, 2.0, 4.0}, {1.0, 2.0, 4.0, 8.0}, cov.interior);
  auto domain = cone_interval(4.0, 0.25);
  const RayMap bp = standard_cone_ray(*cov.cover, domain->ray());
  const Homotopy f = winding_loop(domain, *cov.base, {3, 0}).as_homotopy();
  const CoarseMap f0{f.cylinder->base(), cov.pi.source, bp.assignment, std::nullopt};
  try {
    lift_homotopy(cov.pi, cert, f, f0);
    FAIL() << "expected a stuck lift";
  } catch (const StuckLiftError& e) {
    EXPECT_LT(e.column(), domain->columns());
    EXPECT_GE(e.t(), 0.0);
  }
}

TEST(Equivalence, RaysDifferingOnlyBelowTheHorizonAreEquivalent) {
  const auto& s = circle_setup();
  RayMap other = s.base_lift;
  other.assignment[2] = *s.cov.action.apply(s.cov.action.generator(0), other.assignment[2]);
  const auto e = lifts_equivalent(s.cov.pi, s.base_lift, other, 3.0);
  EXPECT_TRUE(e.equivalent);
  EXPECT_DOUBLE_EQ(e.t0, 0.5);
  EXPECT_FALSE(lifts_equivalent(s.cov.pi, s.base_lift, other, 0.25).equivalent);
  RayMap wrong = s.base_lift;
  wrong.assignment[2] = s.cov.cover->vertex(s.cov.cover->split(wrong.assignment[2]).first + 1, 2);
  EXPECT_THROW(lifts_equivalent(s.cov.pi, s.base_lift, wrong, 3.0), InputError);
}

TEST(Correspondence, HomomorphismOnProducts) {
  const auto& s = circle_setup();
  std::vector<LoopMap> loops;
  for (int w : {-1, 0, 1}) loops.push_back(winding_loop(s.domain, *s.cov.base, {w, 0}));
  std::vector<SesProduct> products;
  for (std::size_t a = 0; a < 3; ++a)
    for (std::size_t b = 0; b < 3; ++b) products.push_back({a, b, concatenate(loops[a], loops[b])});
  const auto rep = verify_ses_instance(s.cov.action, s.cov.pi, s.cert, s.base_lift, loops, products, 3.0);
  EXPECT_TRUE(rep.homomorphism_ok);
  EXPECT_TRUE(rep.kernel_ok);
  for (const auto& p : rep.products) {
    EXPECT_TRUE(p.ok);
    EXPECT_EQ(p.product_g.coords[0], int(p.left) - 1 + int(p.right) - 1);
  }
  EXPECT_TRUE(rep.loops[1].closes_up);
}

TEST(Correspondence, TorusWindingsClassifyAgainstTheOracle) {
  auto cov = make_cone_covering(ManifoldModel::torus(1.0, 1.0, 0.25), 2.0, 5.0, 0.25);
  auto cert = build_lift_certificate(cov.pi, {0.5, 1.0, 2.0, 4.0}, {1.0, 2.0, 4.0, 8.0}, cov.interior);
  auto domain = cone_interval(4.0, 0.25);
  const RayMap bp = standard_cone_ray(*cov.cover, domain->ray());
  for (std::array<int, 2> w : {std::array<int, 2>{1, 0}, {0, 1}, {1, 1}}) {
    const LoopMap alpha = winding_loop(domain, *cov.base, w);
    const RayMap end = lifting_correspondence(cov.pi, cert, alpha, bp);
    const auto cls = classify_lift(cov.action, cov.pi, bp, end, 2.0, 3);
    const std::size_t last = domain->columns() - 1;
    std::array<int, 2> turns{};
    for (int axis = 0; axis < 2; ++axis) {
      std::vector<double> angles;
      for (std::size_t k = 0; k <= last; ++k)
        angles.push_back(cov.base->model_point(alpha.map(domain->at(last, k)))[axis]);
      turns[axis] = int(std::lround(oracle::unwrapped_turns(angles)));
    }
    EXPECT_EQ(cls.g.coords, (std::vector<int>{turns[0], turns[1]}));
    EXPECT_EQ(cls.g.coords, (std::vector<int>{w[0], w[1]}));
  }
}

TEST(ColumnTrace, HasOneRowPerLevel) {
  const auto& s = circle_setup();
  const Homotopy f = winding_loop(s.domain, *s.cov.base, {1, 0}).as_homotopy();
  const CoarseMap f0{f.cylinder->base(), s.cov.pi.source, s.base_lift.assignment, std::nullopt};
  const Homotopy lift = lift_homotopy(s.cov.pi, s.cert, f, f0);
  const std::string csv = column_trace_csv(lift, PointId{4});
  EXPECT_EQ(csv.rfind("level,t,point,", 0), 0u);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 1 + long(f.cylinder->column_size(PointId{4})));
}

}  // namespace
}  // namespace coarsekit
