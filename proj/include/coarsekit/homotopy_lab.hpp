// Copyright 2026 The coarsekit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "coarsekit/coarse_maps.hpp"
#include "coarsekit/cylinders_cones.hpp"
#include "coarsekit/lifting.hpp"

namespace coarsekit {

// ---------------------------------------------------------------------------
// Loop algebra on the c([0,1]) grid. Column i, level k means (x, t) = (i h, k h).

/// (α∗β)(i, k) = α(i, 2k) if 2k <= i, else β(i, 2k - i).
LoopMap concatenate(const LoopMap& alpha, const LoopMap& beta);

/// α*(i, k) = α(i, i - k).
LoopMap reverse(const LoopMap& alpha);

/// The loop that stays on its base ray.
LoopMap trivial_loop(const ConeIntervalPtr& domain, const RayMap& base);

/// Builds a loop from a pointwise rule (i, k) -> target point.
LoopMap loop_from(const ConeIntervalPtr& domain, const RayMap& base, std::string label,
                  const std::function<PointId(std::size_t, std::size_t)>& rule);

/// Column i runs once around the model m times: mesh index floor(m k n / i)
/// mod n at cone level i (circle cones). For tori, `winding` gives the turns
/// along each axis.
LoopMap winding_loop(const ConeIntervalPtr& domain, const ConeSpace& cone, std::array<int, 2> winding);

// ---------------------------------------------------------------------------
// Straight-line homotopies

/// Interpolates f(x) -> g(x) with clamped unit speed over a cylinder of
/// constant height closeness(f, g). Cone targets move along the model
/// displacement at linearly interpolated level; coordinate targets move
/// along the segment. Results snap to the nearest target point.
Homotopy straight_line_homotopy(const CoarseMap& f, const CoarseMap& g, double t_step,
                                const ConeSpace* cone = nullptr);

// ---------------------------------------------------------------------------
// Lipschitz reparametrization

/// L_K for K = 0, 1, 2, ...; entries past the table repeat the last value.
struct LevelLipschitzProfile {
  std::vector<double> L;

  double at(std::size_t K) const;
  /// Positive, integer valued, nondecreasing and >= 1 (InputError otherwise).
  void validate() const;
};

/// ρ is piecewise affine with breakpoints n_0 = 0 < n_1 < ... where segment k
/// has length L_{k+2}(k+2) and maps onto [k, k+1].
struct Reparametrization {
  LevelLipschitzProfile profile;
  std::vector<double> breakpoints;

  double rho(double x) const;
  /// g(x, t) = (ρ(x), t ρ(x) / x) with g(0, 0) = (0, 0).
  std::pair<double, double> g(double x, double t) const;
  /// g restricted to a c([0,1]) grid, each coordinate rounded down.
  CoarseMap on_grid(const ConeInterval& domain) const;
};

/// Breakpoints are generated until ρ covers `extent`.
Reparametrization reparametrize_to_lipschitz(const LevelLipschitzProfile& profile, double extent);

using PlaneMap = std::function<std::array<double, 2>(double, double)>;

struct LipschitzCheck {
  Certification cert;
  double worst_ratio = 0.0;
  std::array<double, 4> worst_pair{};  // x, t, x', t'
  std::size_t pairs = 0;
};

/// Samples pairs of c([0,1]) ∩ [0, extent]^2 on a `step` lattice (plus random
/// pairs) and checks |f∘g(a) - f∘g(b)| <= (1 + tolerance)|a - b|.
LipschitzCheck check_composite_lipschitz(const Reparametrization& rep, const PlaneMap& f,
                                         double extent, double step, std::size_t random_pairs,
                                         double tolerance, std::uint64_t seed = 0);

// ---------------------------------------------------------------------------
// Cone contraction

struct ConePoint {
  ModelPoint y{0.0, 0.0};
  double u = 1.0;
};

/// The contraction of a loop in a cone over a Hadamard model toward the ray
/// over `p`. Continuous stages are exposed for bound checks; `h_prime` is the
/// grid homotopy over I_{q∘α'} c([0,1]).
struct Contraction {
  ConeIntervalPtr domain;
  ConePtr cone;
  LoopMap alpha;
  ModelPoint p{0.0, 0.0};
  Homotopy h_prime;
  CoarseMap beta_prime;  // h_prime ∘ i1
  LoopMap beta;          // β(x, t) = β'(x, 0)

  /// H₁((x,t), s) = (x - s, t (x - s) / x), clamped at s = x - max(1, √x).
  std::pair<double, double> h1(double x, double t, double s) const;
  /// α(x / m, t / m) with m = max(1, √x), read at the nearest grid point.
  ConePoint alpha_prime(double x, double t) const;
  double q(const ConePoint& c) const;
  /// H((y, u), s) = (γ_y(s / u), u).
  ConePoint h(const ConePoint& c, double s) const;
};

/// InputError unless the cone's model is Hadamard. α(0, 0) is replaced by the
/// vertex over p at the bottom level.
Contraction contraction_homotopy(const LoopMap& alpha, const ConePtr& cone, const ModelPoint& p);

struct ContractionBounds {
  Certification cert;
  double tolerance = 0.15;
  std::size_t pairs = 0;
  /// Worst value / bound for: q increment (8), first term (4),
  /// second term (4 + 2/√x), third coordinate (|s - s'|), d(y, p) (2√x)
  /// and u (2√x).
  std::array<double, 6> worst_ratio{};
  std::array<std::array<double, 5>, 6> worst_sample{};  // x, t, x', t', s
};

/// Samples pairs at distance <= 1 with x, x' > 1 and checks every bound.
ContractionBounds check_contraction_bounds(const Contraction& c, std::size_t samples,
                                           double tolerance = 0.15, std::uint64_t seed = 0);

// ---------------------------------------------------------------------------
// Boundary fix

/// H' per the five-branch formula over I_p c([0,1]), p(x, t) = x - 1.
/// Column (i, k), level j (s = j h); branches by 4k against i - j, i, 3i,
/// 3i + j.
class BoundaryFix {
 public:
  /// InputError when H((x,0), s) != H((x,x), s) somewhere (message names it).
  BoundaryFix(Homotopy H, ConeIntervalPtr domain, RayMap b);

  int branch(std::size_t i, std::size_t k, std::size_t j) const;
  PointId eval_branch(int branch, std::size_t i, std::size_t k, std::size_t j) const;
  PointId operator()(std::size_t i, std::size_t k, std::size_t j) const {
    return eval_branch(branch(i, k, j), i, k, j);
  }
  Homotopy build() const;
  const CylinderPtr& cylinder() const { return H_.cylinder; }

 private:
  PointId h(std::size_t i, std::size_t k, std::size_t j) const;

  Homotopy H_;
  ConeIntervalPtr domain_;
  RayMap b_;
};

/// The cylinder I_p c([0,1]) with p(x, t) = x - 1 and step equal to the grid's.
CylinderPtr boundary_fix_cylinder(const ConeInterval& domain);

struct BoundaryFixReport {
  Certification cert;
  std::size_t boundary_violations = 0;
  std::size_t seam_mismatches = 0;
  std::size_t seams_checked = 0;
};

/// Relative-boundary property H'((x,0),s) = H'((x,x),s) = b(x) and
/// branch agreement at the t = x/4 and t = 3x/4 seams, both exact.
BoundaryFixReport check_boundary_fix(const BoundaryFix& fix, const Homotopy& h_prime,
                                     const ConeInterval& domain, const RayMap& b);

// ---------------------------------------------------------------------------
// Pasting

enum class PastingMode { coarse, lipschitz };

struct PastingOptions {
  PastingMode mode = PastingMode::coarse;
  std::vector<double> radii{1.0, 2.0, 4.0};
  double link = 1.0;  // chain link length for the coarse bound
  double tolerance = 0.05;
  unsigned threads = 0;
};

/// Piecewise profiles (or Lipschitz constants) and the global bound they
/// imply; refuted with a witness pair when the global measurement exceeds it.
/// InputError when the pieces do not cover the source.
Certification check_pasting(const CoarseMap& f, const std::vector<std::vector<PointId>>& pieces,
                            const PastingOptions& opts = {});

/// "x,t,s,target_point" rows (base coordinates, then s, then the image id).
std::string homotopy_csv(const Homotopy& h);

}  // namespace coarsekit
