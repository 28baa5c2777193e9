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

#pragma once

// Config-driven pipeline behind the command-line tool. Every command reads
// its inputs from and writes its artifacts to RunConfig::output_dir:
//
//   ingest    ingest_<label>.jsonl
//   synth     corpus.jsonl
//   extract   features.csv
//   train     splits.json, models/<feature_set>/<algorithm>/fold<k>.json
//   evaluate  report.json, report.csv
//   attack    attacks/<kind>_<feature_set>_<algorithm>.csv, attacks/rankings.json
//   drift     drift/<temporal|interaction>_<feature_set>_<algorithm>.csv
//   report    summary.json
//
// Outputs are a pure function of the config minus jobs/output_dir/cache_dir,
// whose hash every artifact carries.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace memptec {

struct RunConfig {
  std::uint64_t seed = 42;
  std::string output_dir = "memptec-out";
  std::string cache_dir = ".memptec-cache";
  int jobs = 1;

  // Dataset. With malicious/benign corpora set, extract assembles them at
  // `ratio`; otherwise it reads `corpus` (default <output_dir>/corpus.jsonl).
  std::string corpus;
  std::string malicious_corpus;
  std::string benign_corpus;
  std::string ratio = "balanced";
  std::size_t n_malicious = 3232;
  std::size_t n_benign = 3232;
  std::string profile;  // JSON overrides of the default synthetic profile
  std::optional<std::string> reference_time;
  double ccs_base = 2.0;

  std::vector<std::string> feature_sets = {"existing_tec", "memptec_e", "memptec_d", "memptec"};
  std::vector<std::string> algorithms = {"glm", "svm", "gbm", "drf", "mlp"};
  std::string split_mode = "repeated";  // repeated | kfold
  int folds = 5;

  std::string attack_kind = "percentage";  // percentage | topn | information
  std::vector<double> steps = {10, 20, 30, 40, 50, 60, 70, 80, 90, 100};  // percent
  int top_n = 10;
  std::string ranking = "permutation";
  int ranking_repeats = 10;
  std::string attack_scope = "test";  // test | all
  std::vector<std::int64_t> drift_days = {0, 30, 90, 180, 360};
  std::vector<std::int64_t> drift_counts = {0, 10, 20, 30, 40, 50};

  // Ingestion.
  std::vector<std::string> packages;
  std::string package_list;  // file with one name per line
  std::string label = "benign";
  std::string cache_mode = "cache-first";  // offline | cache-first | refresh
  std::string registry_url = "https://registry.npmjs.org";
  std::string repo_api_url = "https://api.github.com";
  bool fetch_interactions = false;
  double requests_per_second = 2.0;
  int max_concurrent = 4;
};

// Throws Error(kConfigInvalid) naming the offending field.
void ValidateRunConfig(const RunConfig& cfg);

nlohmann::json ToJson(const RunConfig& cfg);
// Hash of the config without jobs, output_dir and cache_dir.
std::string ConfigHash(const RunConfig& cfg);

const std::vector<std::string>& Commands();

// Runs one command. Returns 0 on success, 1 on validation errors (bad config
// or arguments), 2 on runtime errors; messages go to `err`.
int RunCommand(const std::string& command, const RunConfig& cfg, std::ostream& out, std::ostream& err);

}  // namespace memptec
