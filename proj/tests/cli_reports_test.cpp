// Copyright 2026 The coarsekit Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "coarsekit/coarsekit.h"
#include "coarsekit/errors.hpp"
#include "coarsekit/experiment.hpp"

namespace coarsekit {
namespace {

namespace fs = std::filesystem;

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("coarsekit_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

void write(const fs::path& p, const std::string& text) {
  std::ofstream(p, std::ios::binary) << text;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(COARSEKIT_CLI) + " " + args + " >/dev/null 2>&1";
  const int st = std::system(cmd.c_str());
  return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

const char* kSmallCovering = R"({"object": "cone-covering",
  "model": {"type": "circle", "circumference": 1, "mesh": 0.25},
  "cover_half_width": 2, "t_max": 5, "t_step": 0.25})";

TEST(Rounding, TwelveSignificantDigits) {
  json j = {{"a", 0.1 + 0.2}, {"b", 1.0 / 3.0}, {"c", 7}, {"d", -0.0}, {"e", 1e300 * 1e10}};
  const json r = round_numbers(j);
  EXPECT_EQ(r["a"].get<double>(), 0.3);
  EXPECT_EQ(r.dump(), R"({"a":0.3,"b":0.333333333333,"c":7,"d":0.0,"e":"inf"})");
}

TEST(AtomicWrite, CreatesDirectoriesAndLeavesNoTemporary) {
  const auto dir = scratch("atomic");
  const auto target = dir / "nested" / "report.json";
  write_file_atomic(target.string(), "one\n");
  write_file_atomic(target.string(), "two\n");
  EXPECT_EQ(slurp(target), "two\n");
  EXPECT_FALSE(fs::exists(target.string() + ".tmp"));
}

TEST(Experiment, ValidationNamesTheProblem) {
  EXPECT_THROW(validate_experiment(json::array()), InputError);
  EXPECT_THROW(validate_experiment(json{{"name", "x"}, {"stages", json::array()}}), InputError);
  const json bad_use = json::parse(R"({"name": "x", "stages": [
      {"name": "a", "kind": "certify", "uses": "missing", "params": {"check": "isometries"}}]})");
  try {
    validate_experiment(bad_use);
    FAIL();
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("missing"), std::string::npos);
  }
  const json bad_kind = json::parse(R"({"name": "x", "stages": [{"name": "a", "kind": "fly"}]})");
  EXPECT_THROW(validate_experiment(bad_kind), InputError);
}

TEST(Experiment, InputErrorStopsTheRunWithExitThree) {
  const json spec = json::parse(R"({"name": "x", "stages": [
      {"name": "a", "kind": "build", "params": {"object": "space", "space": {"type": "blob"}}},
      {"name": "b", "kind": "homotopy-check", "params": {"check": "boundary-fix", "extent": 4}}]})");
  const auto rr = run_experiment(spec);
  EXPECT_EQ(rr.exit_code, kExitInput);
  EXPECT_EQ(rr.report["stages"].size(), 1u);
  EXPECT_NE(rr.report["error"].get<std::string>().find("blob"), std::string::npos);
}

TEST(Experiment, ReportsAreByteIdenticalAcrossRunsAndThreads) {
  const json spec = json::parse(std::string(R"({"name": "det", "seed": 4, "stages": [
      {"name": "cov", "kind": "build", "params": )") + kSmallCovering + R"(},
      {"name": "soft", "kind": "certify", "uses": "cov", "params": {"check": "soft-quotient", "radii": [1, 2]}},
      {"name": "prof", "kind": "certify", "uses": "cov", "params": {"check": "control-profile", "radii": [1, 2]}}]})");
  RunOptions one, four;
  one.threads = 1;
  four.threads = 4;
  const auto a = dump_report(run_experiment(spec, one).report);
  const auto b = dump_report(run_experiment(spec, one).report);
  const auto c = dump_report(run_experiment(spec, four).report);
  EXPECT_EQ(a, b);
  EXPECT_EQ(a, c);
  EXPECT_EQ(a.find("threads"), std::string::npos);
}

TEST(Experiment, SeedOverrideIsRecorded) {
  const json spec = json::parse(R"({"name": "s", "seed": 1, "stages": [
      {"name": "c", "kind": "certify", "params": {"check": "cat0-convexity", "trials": 50}}]})");
  RunOptions o;
  o.seed = 9;
  EXPECT_EQ(run_experiment(spec, o).report["seed"], 9);
  EXPECT_EQ(run_experiment(spec).report["seed"], 1);
}

TEST(Experiment, ExpectedRefutationCountsAsSuccess) {
  const json spec = json::parse(std::string(R"({"name": "r", "stages": [
      {"name": "cov", "kind": "build", "params": )") + kSmallCovering + R"(},
      {"name": "cert", "kind": "certify", "uses": "cov",
       "params": {"check": "lift-certificate", "soft_radii": [0.5, 1, 2, 4], "scatter_radii": [1, 2, 4, 8]}},
      {"name": "wrong", "kind": "correspond", "uses": ["cov", "cert"], "expect_refute": true,
       "params": {"windings": [[1]], "extent": 4, "horizon": 2, "expect": [[2]]}}]})");
  const auto rr = run_experiment(spec);
  EXPECT_EQ(rr.exit_code, kExitOk);
  EXPECT_EQ(rr.report["stages"][2]["status"], "refuted-as-expected");
}

TEST(Verbs, MapToSmallExperiments) {
  const json q = verb_to_experiment("quotient", json::parse(kSmallCovering));
  EXPECT_EQ(q["stages"].size(), 3u);
  EXPECT_THROW(verb_to_experiment("certify", json::object()), InputError);
  EXPECT_THROW(verb_to_experiment("teleport", json::object()), InputError);
}

TEST(CApi, SpaceHandlesAndErrors) {
  ck_space* s = nullptr;
  ASSERT_EQ(ck_space_from_json(R"({"type": "graph", "edges": [[0, 1, 0.5], [1, 2, 0.25]]})", nullptr, &s), CK_OK);
  size_t n = 0;
  EXPECT_EQ(ck_space_size(s, &n), CK_OK);
  EXPECT_EQ(n, 3u);
  double d = 0.0;
  EXPECT_EQ(ck_space_distance(s, 0, 2, &d), CK_OK);
  EXPECT_EQ(d, 0.75);
  EXPECT_EQ(ck_space_distance(s, 0, 9, &d), CK_INPUT_ERROR);
  EXPECT_NE(std::string(ck_last_error()).find("range"), std::string::npos);
  char* desc = nullptr;
  EXPECT_EQ(ck_space_describe(s, &desc), CK_OK);
  EXPECT_NE(std::string(desc).find("\"points\": 3"), std::string::npos);
  ck_string_free(desc);
  ck_space_free(s);

  ck_space* bad = nullptr;
  EXPECT_EQ(ck_space_from_json("{ nope", nullptr, &bad), CK_INPUT_ERROR);
  EXPECT_NE(std::string(ck_last_error()).find("<space>:1:"), std::string::npos);
  EXPECT_EQ(ck_space_size(nullptr, &n), CK_INPUT_ERROR);
  EXPECT_STREQ(ck_version(), kVersion);
}

TEST(CApi, ConeFromJson) {
  ck_space* c = nullptr;
  ASSERT_EQ(ck_cone_from_json(R"({"model": {"type": "circle", "circumference": 1, "mesh": 0.25},
                                  "t_max": 2, "t_step": 0.5})", &c), CK_OK);
  size_t n = 0;
  ck_space_size(c, &n);
  EXPECT_EQ(n, 12u);
  ck_space_free(c);
}

TEST(Cli, ExitCodes) {
  const auto dir = scratch("cli");
  write(dir / "ok.json", R"({"type": "grid", "dim": 1, "extent": 4, "step": 1})");
  EXPECT_EQ(run_cli("build-space --spec " + (dir / "ok.json").string() + " --out " + (dir / "out").string()), 0);
  EXPECT_TRUE(fs::exists(dir / "out" / "report.json"));
  EXPECT_TRUE(fs::exists(dir / "out" / "timings.json"));

  write(dir / "broken.json", "{");
  EXPECT_EQ(run_cli("build-space --spec " + (dir / "broken.json").string()), 3);
  EXPECT_EQ(run_cli("run --spec " + (dir / "absent.json").string()), 3);
  EXPECT_EQ(run_cli("build-space"), 3);

  write(dir / "refute.json", std::string(R"({"build": )") + kSmallCovering +
                                 R"(, "windings": [[1]], "extent": 4, "horizon": 2, "expect": [[0]]})");
  EXPECT_EQ(run_cli("correspond --spec " + (dir / "refute.json").string()), 2);

  write(dir / "stuck.json", R"({"build": {"model": {"type": "circle", "circumference": 1, "mesh": 0.25},
      "cover_half_width": 1, "t_max": 5, "t_step": 0.25},
      "certificate": {"soft_radii": [0.5, 1, 2, 4], "scatter_radii": [1, 2, 4, 8]},
      "winding": [3], "extent": 4})");
  EXPECT_EQ(run_cli("lift --spec " + (dir / "stuck.json").string() + " --out " + (dir / "stuck").string()), 4);
  EXPECT_NE(slurp(dir / "stuck" / "report.json").find("stuck-lift"), std::string::npos);
}

TEST(Cli, ThreadsFromEnvironmentDoNotChangeTheReport) {
  const auto dir = scratch("env");
  const std::string spec = std::string(COARSEKIT_SPECS) + "/boundary-fix.json";
  ASSERT_EQ(run_cli("run --spec " + spec + " --out " + (dir / "a").string()), 0);
  const std::string cmd = "COARSEKIT_THREADS=3 " + std::string(COARSEKIT_CLI) + " run --spec " + spec +
                          " --out " + (dir / "b").string() + " >/dev/null 2>&1";
  ASSERT_EQ(std::system(cmd.c_str()), 0);
  EXPECT_EQ(slurp(dir / "a" / "report.json"), slurp(dir / "b" / "report.json"));
}

TEST(Cli, DescribeReadsEveryArtifactKind) {
  const auto dir = scratch("describe");
  write(dir / "g.txt", "0 1 1\n1 2 1\n");
  EXPECT_EQ(run_cli("describe " + (dir / "g.txt").string()), 0);
  write(dir / "s.json", R"({"type": "grid", "dim": 2, "extent": 2, "step": 1})");
  EXPECT_EQ(run_cli("describe " + (dir / "s.json").string()), 0);
  EXPECT_EQ(run_cli("describe " + std::string(COARSEKIT_SPECS) + "/lift.json"), 0);
  write(dir / "junk.json", R"({"hello": 1})");
  EXPECT_EQ(run_cli("describe " + (dir / "junk.json").string()), 3);
  char* text = nullptr;
  ASSERT_EQ(ck_describe_file((dir / "g.txt").string().c_str(), &text), CK_OK);
  EXPECT_NE(std::string(text).find("points: 3"), std::string::npos);
  ck_string_free(text);
}

}  // namespace
}  // namespace coarsekit
