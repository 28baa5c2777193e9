/*
 * Copyright 2026 The memptec Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */


#include "memptec/run.hpp"

#include <gtest/gtest.h>

#include <sstream>

#include "json.hpp"
#include "test_support.hpp"

namespace memptec {
namespace {

using nlohmann::json;

RunConfig Small(const std::string& tag) {
  RunConfig cfg;
  cfg.output_dir = test::TempDir(tag).string();
  cfg.n_malicious = 60;
  cfg.n_benign = 60;
  cfg.seed = 3;
  cfg.folds = 2;
  cfg.algorithms = {"glm", "drf"};
  cfg.ranking_repeats = 2;
  return cfg;
}

int RunOk(const std::string& cmd, const RunConfig& cfg) {
  std::ostringstream out, err;
  const int rc = RunCommand(cmd, cfg, out, err);
  EXPECT_EQ(rc, 0) << cmd << ": " << err.str();
  return rc;
}

json ReadJson(const std::filesystem::path& p) { return json::parse(ReadFile(p)); }

TEST(RunConfig, ValidationIsExitOne) {
  RunConfig cfg = Small("validate");
  std::ostringstream out, err;
  cfg.folds = 1;
  EXPECT_EQ(RunCommand("train", cfg, out, err), 1);
  EXPECT_NE(err.str().find("folds"), std::string::npos);
  cfg = Small("validate");
  cfg.feature_sets = {"nope"};
  EXPECT_EQ(RunCommand("train", cfg, out, err), 1);
  cfg = Small("validate");
  cfg.steps = {50, 20};
  EXPECT_EQ(RunCommand("attack", cfg, out, err), 1);
  cfg = Small("validate");
  cfg.ccs_base = 1.0;
  EXPECT_EQ(RunCommand("extract", cfg, out, err), 1);
  cfg = Small("validate");
  EXPECT_EQ(RunCommand("frobnicate", cfg, out, err), 1);
  cfg.split_mode = "loo";
  EXPECT_EQ(test::CodeOf([&] { ValidateRunConfig(cfg); }), ErrorCode::kConfigInvalid);
}

TEST(RunConfig, MissingArtifactIsExitTwo) {
  const RunConfig cfg = Small("missing");
  std::ostringstream out, err;
  EXPECT_EQ(RunCommand("train", cfg, out, err), 2);
  EXPECT_NE(err.str().find("extract"), std::string::npos);
}

TEST(RunConfig, HashIgnoresExecutionSettings) {
  RunConfig a = Small("hash");
  RunConfig b = a;
  b.jobs = 8;
  b.output_dir = "/elsewhere";
  b.cache_dir = "/cache";
  EXPECT_EQ(ConfigHash(a), ConfigHash(b));
  b.seed = 4;
  EXPECT_NE(ConfigHash(a), ConfigHash(b));
}

TEST(RunPipeline, EndToEnd) {
  RunConfig cfg = Small("e2e");
  for (const char* cmd : {"synth", "extract", "train", "evaluate", "attack", "drift", "report"}) {
    ASSERT_EQ(RunOk(cmd, cfg), 0);
  }
  const std::filesystem::path dir = cfg.output_dir;
  const auto report = ReadJson(dir / "report.json");
  EXPECT_EQ(report["meta"]["config_hash"], ConfigHash(cfg));
  EXPECT_EQ(report["dataset"]["rows"], 120);
  ASSERT_EQ(report["entries"].size(), 8u);
  std::map<std::string, int> sizes;
  for (const auto& e : report["entries"]) {
    sizes[e["feature_set"]] = e["n_features"];
    EXPECT_EQ(e["folds"].size(), 2u);
  }
  EXPECT_EQ(sizes["existing_tec"], 11);
  EXPECT_EQ(sizes["memptec_e"], 36);
  EXPECT_EQ(sizes["memptec_d"], 20);
  EXPECT_EQ(sizes["memptec"], 56);

  const std::string csv = ReadFile(dir / "attacks" / "percentage_memptec_glm.csv");
  EXPECT_EQ(csv.rfind("# memptec 0.1.0 config=" + ConfigHash(cfg), 0), 0u);
  const auto lines = SplitString(TrimAscii(csv), '\n');
  ASSERT_EQ(lines.size(), 13u);  // comment, header, baseline, 10 steps
  EXPECT_EQ(SplitString(lines.back(), ',')[4], "56");

  EXPECT_TRUE(std::filesystem::exists(dir / "drift" / "temporal_memptec_glm.csv"));
  EXPECT_TRUE(std::filesystem::exists(dir / "models" / "memptec" / "drf" / "fold1.json"));
  const auto summary = ReadJson(dir / "summary.json");
  EXPECT_TRUE(summary.contains("attacks"));
  EXPECT_TRUE(summary.contains("drift"));
}

TEST(RunPipeline, OutputsDoNotDependOnJobs) {
  RunConfig a = Small("jobs-a");
  a.feature_sets = {"memptec_d"};
  RunConfig b = a;
  b.output_dir = test::TempDir("jobs-b").string();
  b.jobs = 3;
  for (const char* cmd : {"synth", "extract", "train", "evaluate", "attack"}) {
    ASSERT_EQ(RunOk(cmd, a), 0);
    ASSERT_EQ(RunOk(cmd, b), 0);
  }
  for (const char* f : {"features.csv", "report.json", "report.csv", "attacks/percentage_memptec_d_drf.csv",
                        "models/memptec_d/drf/fold0.json"}) {
    EXPECT_EQ(ReadFile(std::filesystem::path(a.output_dir) / f), ReadFile(std::filesystem::path(b.output_dir) / f))
        << f;
  }
}

}  // namespace
}  // namespace memptec
