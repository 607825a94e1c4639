// Copyright 2026 The coarsekit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "coarsekit/json_io.hpp"

namespace coarsekit {

inline constexpr const char* kVersion = "0.3.0";

/// Process exit statuses shared by the runner, the C API and the CLI.
enum ExitCode : int {
  kExitOk = 0,
  kExitRefuted = 2,
  kExitInput = 3,
  kExitStuckLift = 4,
};

struct RunOptions {
  std::optional<std::uint64_t> seed;   // overrides the spec's seed
  unsigned threads = 0;                // 0: COARSEKIT_THREADS or 1
  std::optional<double> tolerance;     // overrides every stage tolerance
  std::string spec_dir = ".";          // resolves relative input files
};

struct RunResult {
  json report;
  int exit_code = kExitOk;
  /// (file name, content) pairs written next to the report.
  std::vector<std::pair<std::string, std::string>> side_files;
  /// Wall-clock seconds per stage; kept out of the report so that reports
  /// stay byte-identical between runs.
  json timings = json::object();
};

/// Validates the experiment document: a name, an optional seed and a list of
/// stages whose "uses" refer only to earlier stages. Throws InputError.
void validate_experiment(const json& spec);

/// Runs every stage in order. Never throws for stage failures: input errors
/// and stuck lifts stop the run and are recorded in the report.
RunResult run_experiment(const json& spec, const RunOptions& opts = {});

/// Reads, parses and runs a spec file; relative inputs resolve against the
/// file's directory.
RunResult run_experiment_file(const std::string& path, RunOptions opts = {});

/// Wraps the parameters of a single CLI verb into a one- or two-stage
/// experiment (build-space, cone, quotient, certify, lift, correspond,
/// homotopy).
json verb_to_experiment(const std::string& verb, const json& params);

/// Writes report.json, timings.json and the side files into `out_dir`.
void write_run(const RunResult& result, const std::string& out_dir);

/// Human-readable summary of a space descriptor, edge list, certificate
/// table or run report.
std::string describe_artifact(const std::string& path);

}  // namespace coarsekit
