// Copyright 2026 The coarsekit Authors
// SPDX-License-Identifier: Apache-2.0

// Command-line front end. Talks to the library through the C interface only.

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <string>

#include "coarsekit/coarsekit.h"

namespace {

struct Flags {
  std::string spec;
  std::string out;
  uint64_t seed = 0;
  unsigned threads = 0;
  double tolerance = 0.0;
};

void add_run_flags(CLI::App* sub, Flags& f) {
  sub->add_option("--spec", f.spec, "JSON parameter or experiment file")->required();
  sub->add_option("--out", f.out, "directory for report.json and side files");
  sub->add_option("--seed", f.seed, "RNG seed (default: the spec's seed, else 0)");
  sub->add_option("--threads", f.threads, "worker threads (default: COARSEKIT_THREADS, else 1)");
  sub->add_option("--tolerance", f.tolerance, "override every stage tolerance");
}

int emit(ck_status st, char* report) {
  if (report) {
    std::fputs(report, stdout);
    ck_string_free(report);
  }
  if (st != CK_OK && ck_last_error()[0] != '\0') std::fprintf(stderr, "coarsekit: %s\n", ck_last_error());
  return st == CK_INTERNAL ? 1 : static_cast<int>(st);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"coarsekit: coarse metric spaces, cones and lifting of coarse homotopies"};
  app.set_version_flag("--version", std::string(ck_version()));
  app.require_subcommand(1);

  static const char* kVerbs[][2] = {
      {"build-space", "build a metric space from a descriptor and summarize it"},
      {"cone", "build a discretized open cone over a compact model"},
      {"quotient", "build a covering cone pair and check the group action"},
      {"certify", "run one certificate check on a covering"},
      {"lift", "lift a loop through a covering with both tie-break rules"},
      {"correspond", "classify loops by the lifting correspondence"},
      {"homotopy", "run one homotopy construction check"},
      {"run", "run a multi-stage experiment file"},
  };
  Flags flags;
  std::string verb;
  for (const auto& v : kVerbs) {
    auto* sub = app.add_subcommand(v[0], v[1]);
    add_run_flags(sub, flags);
    sub->callback([&verb, name = std::string(v[0])] { verb = name; });
  }
  std::string describe_path;
  auto* describe = app.add_subcommand("describe", "summarize a space, edge list, certificate or report");
  describe->add_option("path", describe_path, "artifact file")->required();
  describe->callback([&verb] { verb = "describe"; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 3;
  }

  if (verb == "describe") {
    char* text = nullptr;
    const ck_status st = ck_describe_file(describe_path.c_str(), &text);
    return emit(st, text);
  }

  ck_run_options opts{};
  opts.seed = flags.seed;
  opts.seed_set = app.get_subcommand(verb)->count("--seed") > 0;
  opts.threads = flags.threads;
  opts.tolerance = flags.tolerance;
  opts.tolerance_set = app.get_subcommand(verb)->count("--tolerance") > 0;
  opts.out_dir = flags.out.empty() ? nullptr : flags.out.c_str();

  char* report = nullptr;
  const ck_status st = verb == "run" ? ck_run_experiment(flags.spec.c_str(), &opts, &report)
                                     : ck_run_verb(verb.c_str(), flags.spec.c_str(), &opts, &report);
  return emit(st, report);
}
