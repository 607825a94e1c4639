// Copyright 2026 The coarsekit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "coarsekit/coarse_maps.hpp"
#include "coarsekit/cylinders_cones.hpp"
#include "coarsekit/group_quotient.hpp"
#include "coarsekit/metric_space.hpp"

namespace coarsekit {

/// H : I_pX -> Y, stored pointwise on the cylinder grid.
struct Homotopy {
  CylinderPtr cylinder;
  CoarseMap map;  // cylinder->space() -> Y

  /// H ∘ i0 and H ∘ i1 as maps from the base X.
  CoarseMap start() const;
  CoarseMap end() const;
  void validate() const;
};

/// A map from the t-grid of R+ (a 1-D grid space) into a target.
struct RayMap {
  SpacePtr domain;
  SpacePtr target;
  std::vector<PointId> assignment;
  std::optional<ControlProfile> profile;

  std::size_t size() const { return assignment.size(); }
  double t(std::size_t i) const { return domain->coords(PointId{i})[0]; }
  CoarseMap as_map() const { return CoarseMap{domain, target, assignment, profile}; }
  void validate() const;
};

/// The ray k -> (basepoint of a cone's model, level k); the domain is the
/// ray of `domain_cone`, whose column i is sent to cone level i.
RayMap standard_cone_ray(const ConeSpace& cone, const SpacePtr& ray_domain);

/// g ∘ b, or nullopt where g leaves a truncated model.
std::optional<RayMap> act_on_ray(const GroupAction& action, const GroupElement& g, const RayMap& b);

/// α : c([0,1]) -> Y with α∘i0 = α∘i1 = base.
struct LoopMap {
  ConeIntervalPtr domain;
  CoarseMap map;
  RayMap base;
  std::string label;
  /// Largest jump across a concatenation seam (0 for primitive loops).
  double seam_gap = 0.0;

  void validate() const;
  /// The loop as a homotopy over the ray (the t-direction of c([0,1])).
  Homotopy as_homotopy() const;
};

enum class TieBreak { smallest_id, largest_id };

struct LiftOptions {
  TieBreak tie_break = TieBreak::smallest_id;
  unsigned threads = 0;
};

/// Step bound for lifting f: T = S(ρ_f(t_step)).
struct StepBound {
  double delta = 0.0;
  double rho = 0.0;
  double T = 0.0;
};

StepBound lift_step_bound(const LiftCertificate& cert, const Homotopy& f);

/// Marches each column upward, picking the nearest point of the next fibre
/// within T of the current lift point (ties by `opts.tie_break`). Throws
/// StuckLiftError when a fibre is out of reach and InputError when
/// π∘f0 ≠ f∘i0.
Homotopy lift_homotopy(const CoarseMap& pi, const LiftCertificate& cert, const Homotopy& f,
                       const CoarseMap& f0, const LiftOptions& opts = {});

/// Quantities controlling a lift: the step bound T, the cross-column bound
/// S at pair radius R, and the columns whose image meets K(2S + 2T).
struct LiftBounds {
  StepBound step;
  double pair_radius = 1.0;
  double S = 0.0;
  double scatter_radius = 0.0;
  BoundedSet K;  // in the target of pi
  std::vector<bool> exceptional_column;
  /// Radius about the cylinder basepoint of all exceptional columns.
  double exceptional_radius = 0.0;
};

LiftBounds lift_bounds(const CoarseMap& pi, const LiftCertificate& cert, const Homotopy& f,
                       const CoarseMap& f0, double pair_radius = 1.0);

/// Checks commutation, initial condition, the cross-column bound S outside
/// the exceptional columns and the per-step bound T, in that order.
Certification verify_lift(const CoarseMap& pi, const Homotopy& f, const Homotopy& f_tilde,
                          const CoarseMap& f0, const LiftBounds& bounds);

struct UniquenessDefect {
  bool empty = true;
  BoundedSet ball;  // in the cylinder, around its basepoint
  std::vector<PointId> disagreements;
  bool reaches_boundary = false;
};

/// Both lifts must cover the same f from the same f0 (InputError otherwise).
UniquenessDefect uniqueness_defect(const CoarseMap& pi, const Homotopy& f, const CoarseMap& f0,
                                   const Homotopy& a, const Homotopy& b);

struct Equivalence {
  bool equivalent = false;
  double t0 = 0.0;  // last disagreement (0 if none)
  double horizon = 0.0;
};

Equivalence lifts_equivalent(const CoarseMap& pi, const RayMap& b1, const RayMap& b2,
                             double horizon);

/// Φ(α) = α̃ ∘ i1 where α̃ lifts α with initial edge b'.
RayMap lifting_correspondence(const CoarseMap& pi, const LiftCertificate& cert,
                              const LoopMap& alpha, const RayMap& b_prime,
                              const LiftOptions& opts = {});

struct Classification {
  GroupElement g;
  double t0 = 0.0;
  double horizon = 0.0;
  std::size_t candidates = 0;
};

/// The unique g in the word ball with b'' ∼ g∘b' up to the horizon. Throws
/// RefutedError when no candidate or more than one candidate matches.
Classification classify_lift(const GroupAction& action, const CoarseMap& pi,
                             const RayMap& b_prime, const RayMap& b_dd, double horizon,
                             int word_radius = 4);

struct SesLoopResult {
  std::string label;
  Classification cls;
  /// Terminal edge ∼ b' (the lift closes up); meaningful when g is trivial.
  bool closes_up = false;
};

struct SesProductResult {
  std::size_t left = 0;
  std::size_t right = 0;
  GroupElement product_g;
  GroupElement expected;
  bool ok = false;
};

struct SesProduct {
  std::size_t left = 0;
  std::size_t right = 0;
  LoopMap loop;
};

struct SesReport {
  std::vector<SesLoopResult> loops;
  std::vector<SesProductResult> products;
  bool homomorphism_ok = true;
  bool kernel_ok = true;
  double horizon = 0.0;
};

/// Classifies every loop and every provided product α∗β, checks
/// g(α∗β) = g(α)·g(β), and checks that loops with trivial g lift to loops.
SesReport verify_ses_instance(const GroupAction& action, const CoarseMap& pi,
                              const LiftCertificate& cert, const RayMap& b_prime,
                              const std::vector<LoopMap>& loops,
                              const std::vector<SesProduct>& products, double horizon,
                              int word_radius = 4, const LiftOptions& opts = {});

/// "level,t,point,coords..." rows for the lifted column over base point x.
std::string column_trace_csv(const Homotopy& f_tilde, PointId x);

}  // namespace coarsekit
