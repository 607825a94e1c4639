// Copyright 2026 The coarsekit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "coarsekit/metric_space.hpp"

namespace coarsekit {

/// Sampled control function: bounds[i] dominates d(f(x), f(x')) over every
/// scanned pair with d(x, x') <= radii[i].
struct ControlProfile {
  std::vector<double> radii;
  std::vector<double> bounds;
  std::size_t pairs_scanned = 0;
  bool subsampled = false;

  /// Bound at the smallest tabulated radius >= r; +inf if r exceeds the table.
  double at(double r) const;
};

/// A total map between two finite spaces, stored pointwise.
struct CoarseMap {
  SpacePtr source;
  SpacePtr target;
  std::vector<PointId> assignment;
  std::optional<ControlProfile> profile;

  PointId operator()(PointId x) const { return assignment.at(x.index); }
  void validate() const;
};

CoarseMap identity_map(SpacePtr space);
CoarseMap constant_map(SpacePtr source, SpacePtr target, PointId value);
/// f ∘ g
CoarseMap compose(const CoarseMap& f, const CoarseMap& g);

enum class Verdict { certified, refuted, inconclusive };
const char* to_string(Verdict v);

struct TrendRow {
  double radius = 0.0;
  double value = 0.0;
};

/// Outcome of a finite-model check. A refutation always carries a witness.
struct Certification {
  Verdict verdict = Verdict::inconclusive;
  std::vector<PointId> witness;
  std::string witness_note;
  std::vector<TrendRow> trend;
  std::vector<std::pair<std::string, double>> parameters;
  std::string note;

  bool certified() const { return verdict == Verdict::certified; }
  void param(std::string key, double value) { parameters.emplace_back(std::move(key), value); }
};

struct ScanOptions {
  std::uint64_t pair_budget = 10'000'000;
  std::uint64_t seed = 0;
  unsigned threads = 0;
};

/// Default radii grid: powers of two from 1 up to (and including the first
/// value >= ) `diameter`.
std::vector<double> default_radii(double diameter);

ControlProfile control_profile(const CoarseMap& f, const std::vector<double>& radii,
                               const ScanOptions& opts = {});

/// Preimage growth of target balls around the target basepoint. Refuted
/// when, at every probe radius, a proper target ball pulls back to a set
/// reaching the source's outer shell (a finite-model heuristic; the report
/// says so).
Certification certify_coarse(const CoarseMap& f, const std::vector<double>& truncation_radii);

struct Closeness {
  double value = 0.0;
  PointId witness;
  std::vector<TrendRow> trend;  // sup over source balls of growing radius
  bool unbounded_trend = false;
};

Closeness closeness(const CoarseMap& f, const CoarseMap& g);

/// Certifies g as f-coarse, i.e. f ∘ g coarse.
Certification is_relative_coarse(const CoarseMap& g, const CoarseMap& f,
                                 const std::vector<double>& truncation_radii);

/// "radius,bound" rows with a header line.
std::string profile_csv(const ControlProfile& profile);

}  // namespace coarsekit
