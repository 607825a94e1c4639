// Copyright 2026 The coarsekit Authors
// SPDX-License-Identifier: Apache-2.0

#include "coarsekit/coarsekit.h"

#include <algorithm>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <string>

#include "coarsekit/errors.hpp"
#include "coarsekit/experiment.hpp"
#include "coarsekit/json_io.hpp"

struct ck_space {
  coarsekit::SpacePtr space;
};

namespace {

thread_local std::string g_last_error;

char* dup(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out) std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

template <class F>
ck_status guarded(F&& f) {
  g_last_error.clear();
  try {
    return f();
  } catch (const coarsekit::StuckLiftError& e) {
    g_last_error = e.what();
    return CK_STUCK_LIFT;
  } catch (const coarsekit::RefutedError& e) {
    g_last_error = e.what();
    return CK_REFUTED;
  } catch (const coarsekit::InputError& e) {
    g_last_error = e.what();
    return CK_INPUT_ERROR;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return CK_INTERNAL;
  }
}

ck_status null_arg(const char* what) {
  g_last_error = std::string("null argument: ") + what;
  return CK_INPUT_ERROR;
}

coarsekit::RunOptions run_options(const ck_run_options* o) {
  coarsekit::RunOptions r;
  if (!o) return r;
  if (o->seed_set) r.seed = o->seed;
  r.threads = o->threads;
  if (o->tolerance_set) r.tolerance = o->tolerance;
  return r;
}

ck_status finish(const coarsekit::RunResult& rr, const ck_run_options* opts, char** report) {
  if (opts && opts->out_dir) coarsekit::write_run(rr, opts->out_dir);
  if (report) *report = dup(coarsekit::dump_report(rr.report));
  if (rr.report.contains("error")) g_last_error = rr.report.at("error").get<std::string>();
  return static_cast<ck_status>(rr.exit_code);
}

}  // namespace

extern "C" {

const char* ck_version(void) { return coarsekit::kVersion; }

const char* ck_last_error(void) { return g_last_error.c_str(); }

void ck_string_free(char* s) { std::free(s); }

ck_status ck_space_from_json(const char* json_text, const char* base_dir, ck_space** out) {
  if (!json_text || !out) return null_arg("json_text/out");
  return guarded([&] {
    const auto j = coarsekit::parse_json(json_text, "<space>");
    *out = new ck_space{coarsekit::space_from_json(j, base_dir ? base_dir : ".")};
    return CK_OK;
  });
}

ck_status ck_space_load_edges(const char* path, size_t basepoint, ck_space** out) {
  if (!path || !out) return null_arg("path/out");
  return guarded([&] {
    const auto edges = coarsekit::parse_edge_list(coarsekit::read_file(path));
    std::size_t n = basepoint + 1;
    for (const auto& e : edges) n = std::max({n, e.a + 1, e.b + 1});
    *out = new ck_space{coarsekit::build_graph_space(n, edges, coarsekit::PointId{basepoint})};
    return CK_OK;
  });
}

ck_status ck_cone_from_json(const char* json_text, ck_space** out) {
  if (!json_text || !out) return null_arg("json_text/out");
  return guarded([&] {
    const auto cone = coarsekit::cone_from_json(coarsekit::parse_json(json_text, "<cone>"));
    *out = new ck_space{cone->space()};
    return CK_OK;
  });
}

void ck_space_free(ck_space* space) { delete space; }

ck_status ck_space_size(const ck_space* space, size_t* out) {
  if (!space || !out) return null_arg("space/out");
  *out = space->space->size();
  return CK_OK;
}

ck_status ck_space_distance(const ck_space* space, size_t a, size_t b, double* out) {
  if (!space || !out) return null_arg("space/out");
  return guarded([&] {
    const std::size_t n = space->space->size();
    if (a >= n || b >= n) throw coarsekit::InputError("point index out of range");
    *out = space->space->distance(coarsekit::PointId{a}, coarsekit::PointId{b});
    return CK_OK;
  });
}

ck_status ck_space_describe(const ck_space* space, char** out_json) {
  if (!space || !out_json) return null_arg("space/out_json");
  return guarded([&] {
    *out_json = dup(coarsekit::dump_report(coarsekit::describe_space(*space->space)));
    return CK_OK;
  });
}

ck_status ck_run_experiment(const char* spec_path, const ck_run_options* opts, char** report) {
  if (!spec_path) return null_arg("spec_path");
  return guarded([&] {
    return finish(coarsekit::run_experiment_file(spec_path, run_options(opts)), opts, report);
  });
}

ck_status ck_run_verb(const char* verb, const char* params_path, const ck_run_options* opts,
                      char** report) {
  if (!verb || !params_path) return null_arg("verb/params_path");
  return guarded([&] {
    coarsekit::RunOptions ro = run_options(opts);
    coarsekit::RunResult rr;
    try {
      const auto params = coarsekit::parse_json(coarsekit::read_file(params_path), params_path);
      const auto parent = std::filesystem::path(params_path).parent_path();
      ro.spec_dir = parent.empty() ? "." : parent.string();
      rr = coarsekit::run_experiment(coarsekit::verb_to_experiment(verb, params), ro);
    } catch (const coarsekit::InputError& e) {
      rr.report = {{"toolkit", {{"name", "coarsekit"}, {"version", coarsekit::kVersion}}},
                   {"status", "error"},
                   {"error", e.what()}};
      rr.exit_code = coarsekit::kExitInput;
    }
    return finish(rr, opts, report);
  });
}

ck_status ck_describe_file(const char* path, char** out_text) {
  if (!path || !out_text) return null_arg("path/out_text");
  return guarded([&] {
    *out_text = dup(coarsekit::describe_artifact(path));
    return CK_OK;
  });
}

}  // extern "C"
