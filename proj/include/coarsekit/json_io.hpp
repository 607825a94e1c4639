// Copyright 2026 The coarsekit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>

#include <json.hpp>

#include "coarsekit/coarse_maps.hpp"
#include "coarsekit/cylinders_cones.hpp"
#include "coarsekit/group_quotient.hpp"
#include "coarsekit/metric_space.hpp"

namespace coarsekit {

using json = nlohmann::ordered_json;

/// Parses JSON text; syntax errors become InputError with line and column.
json parse_json(const std::string& text, const std::string& origin);
std::string read_file(const std::string& path);

/// {"type": "grid", "dim", "extent", "step"}
/// {"type": "graph", "n", "edges": [[a, b, w], ...] | "edges_file", "basepoint"}
/// {"type": "euclidean", "dim", "coords": [...], "basepoint"}
/// `base_dir` resolves relative edge files.
SpacePtr space_from_json(const json& j, const std::string& base_dir = ".");

/// {"type": "circle", "circumference", "mesh"}, {"type": "torus", "periods": [a, b], "mesh"},
/// {"type": "line" | "plane", "half_width", "mesh"}
ManifoldModel model_from_json(const json& j);
/// {"model": {...}, "t_max", "t_step"}
ConePtr cone_from_json(const json& j);

json describe_space(const MetricSpace& s);
json to_json(const Certification& c);
json to_json(const ControlProfile& p);
json to_json(const GroupElement& g);
json to_json(const BoundedSet& k);

/// Rounds every number to 12 significant digits (integers are kept).
json round_numbers(const json& j);
/// Two-space indented dump of the rounded document, newline terminated.
std::string dump_report(const json& j);

/// Writes through a temporary file in the same directory and renames it.
void write_file_atomic(const std::string& path, const std::string& content);

}  // namespace coarsekit
