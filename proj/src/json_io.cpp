// Copyright 2026 The coarsekit Authors
// SPDX-License-Identifier: Apache-2.0

#include "coarsekit/json_io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "coarsekit/errors.hpp"

namespace coarsekit {

namespace fs = std::filesystem;

namespace {

double num(const json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_number())
    throw InputError(std::string("missing numeric field \"") + key + "\"");
  return j.at(key).get<double>();
}

double num_or(const json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number()) throw InputError(std::string("field \"") + key + "\" must be a number");
  return j.at(key).get<double>();
}

std::string str(const json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_string())
    throw InputError(std::string("missing string field \"") + key + "\"");
  return j.at(key).get<std::string>();
}

}  // namespace

json parse_json(const std::string& text, const std::string& origin) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw InputError(origin + ":" + std::to_string(line) + ":" + std::to_string(col) +
                     ": JSON parse error: " + e.what());
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

SpacePtr space_from_json(const json& j, const std::string& base_dir) {
  if (!j.is_object()) throw InputError("space descriptor must be an object");
  const std::string type = str(j, "type");
  if (type == "grid") {
    return build_grid_space(static_cast<int>(num(j, "dim")), num(j, "extent"), num(j, "step"));
  }
  if (type == "graph") {
    std::vector<WeightedEdge> edges;
    if (j.contains("edges_file")) {
      fs::path p = str(j, "edges_file");
      if (p.is_relative()) p = fs::path(base_dir) / p;
      edges = parse_edge_list(read_file(p.string()));
    } else if (j.contains("edges") && j.at("edges").is_array()) {
      for (const auto& e : j.at("edges")) {
        if (!e.is_array() || e.size() != 3) throw InputError("edges must be [a, b, w] triples");
        edges.push_back({e[0].get<std::size_t>(), e[1].get<std::size_t>(), e[2].get<double>()});
      }
    } else {
      throw InputError("graph space needs \"edges\" or \"edges_file\"");
    }
    std::size_t n = 0;
    for (const auto& e : edges) n = std::max({n, e.a + 1, e.b + 1});
    n = static_cast<std::size_t>(num_or(j, "n", static_cast<double>(n)));
    return build_graph_space(n, edges, PointId{static_cast<std::size_t>(num_or(j, "basepoint", 0))});
  }
  if (type == "euclidean") {
    if (!j.contains("coords") || !j.at("coords").is_array())
      throw InputError("euclidean space needs a \"coords\" array");
    return build_euclidean_space(static_cast<std::size_t>(num(j, "dim")),
                                 j.at("coords").get<std::vector<double>>(),
                                 PointId{static_cast<std::size_t>(num_or(j, "basepoint", 0))});
  }
  throw InputError("unknown space type \"" + type + "\"");
}

ManifoldModel model_from_json(const json& j) {
  if (!j.is_object()) throw InputError("model descriptor must be an object");
  const std::string type = str(j, "type");
  const double mesh = num(j, "mesh");
  if (type == "circle") return ManifoldModel::circle(num(j, "circumference"), mesh);
  if (type == "torus") {
    if (!j.contains("periods") || !j.at("periods").is_array() || j.at("periods").size() != 2)
      throw InputError("torus needs \"periods\": [a, b]");
    return ManifoldModel::torus(j.at("periods")[0].get<double>(), j.at("periods")[1].get<double>(),
                                mesh);
  }
  if (type == "line") return ManifoldModel::line(num(j, "half_width"), mesh);
  if (type == "plane") return ManifoldModel::plane(num(j, "half_width"), mesh);
  throw InputError("unknown model type \"" + type + "\"");
}

ConePtr cone_from_json(const json& j) {
  if (!j.is_object() || !j.contains("model")) throw InputError("cone descriptor needs a \"model\"");
  return metric_cone(model_from_json(j.at("model")), num(j, "t_max"), num(j, "t_step"));
}

json describe_space(const MetricSpace& s) {
  json j;
  j["kind"] = to_string(s.kind());
  j["points"] = s.size();
  j["basepoint"] = s.basepoint().index;
  j["coord_dim"] = s.coord_dim();
  j["eccentricity"] = s.eccentricity();
  j["diameter"] = s.diameter();
  j["exact_arithmetic"] = s.tolerance() == 0.0;
  return j;
}

json to_json(const Certification& c) {
  json j;
  j["verdict"] = to_string(c.verdict);
  json params = json::object();
  for (const auto& [k, v] : c.parameters) params[k] = v;
  j["parameters"] = params;
  if (!c.witness.empty()) {
    json w = json::array();
    for (const auto& p : c.witness) w.push_back(p.index);
    j["witness"] = w;
  }
  if (!c.witness_note.empty()) j["witness_note"] = c.witness_note;
  if (!c.trend.empty()) {
    json t = json::array();
    for (const auto& r : c.trend) t.push_back({{"radius", r.radius}, {"value", r.value}});
    j["trend"] = t;
  }
  if (!c.note.empty()) j["note"] = c.note;
  return j;
}

json to_json(const ControlProfile& p) {
  json rows = json::array();
  for (std::size_t i = 0; i < p.radii.size(); ++i)
    rows.push_back({{"radius", p.radii[i]}, {"bound", p.bounds[i]}});
  return json{{"rows", rows}, {"pairs_scanned", p.pairs_scanned}, {"subsampled", p.subsampled}};
}

json to_json(const GroupElement& g) { return json(g.coords); }

json to_json(const BoundedSet& k) {
  if (k.empty) return json{{"empty", true}};
  return json{{"empty", false}, {"center", k.center.index}, {"radius", k.radius}};
}

json round_numbers(const json& j) {
  if (j.is_number_float()) {
    const double v = j.get<double>();
    if (!std::isfinite(v)) return v > 0 ? json("inf") : v < 0 ? json("-inf") : json("nan");
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    const double r = std::strtod(buf, nullptr);
    return r == 0.0 ? json(0.0) : json(r);
  }
  if (j.is_array()) {
    json out = json::array();
    for (const auto& e : j) out.push_back(round_numbers(e));
    return out;
  }
  if (j.is_object()) {
    json out = json::object();
    for (auto it = j.begin(); it != j.end(); ++it) out[it.key()] = round_numbers(it.value());
    return out;
  }
  return j;
}

std::string dump_report(const json& j) { return round_numbers(j).dump(2) + "\n"; }

void write_file_atomic(const std::string& path, const std::string& content) {
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot write " + tmp.string());
    out << content;
    if (!out.flush()) throw InputError("write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) throw InputError("cannot move " + tmp.string() + " into place: " + ec.message());
}

}  // namespace coarsekit
