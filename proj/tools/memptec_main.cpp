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

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "memptec/run.hpp"

int main(int argc, char** argv) {
  memptec::RunConfig cfg;
  if (const char* env = std::getenv("MEMPTEC_CACHE_DIR"); env && *env) cfg.cache_dir = env;

  CLI::App app{"memptec: malicious npm package detection from package metadata"};
  app.set_version_flag("--version", std::string(MEMPTEC_VERSION));
  app.set_config("--config", "", "TOML/INI file with option values");
  app.require_subcommand(1, 1);

  std::string reference_time;
  bool write_config = false;
  app.add_option("--seed", cfg.seed, "Master seed")->capture_default_str();
  app.add_option("--output-dir,-o", cfg.output_dir, "Artifact directory")->capture_default_str();
  app.add_option("--cache-dir", cfg.cache_dir, "Registry response cache (env MEMPTEC_CACHE_DIR)")
      ->capture_default_str();
  app.add_option("--jobs,-j", cfg.jobs, "Worker threads")->capture_default_str();
  app.add_flag("--save-config", write_config, "Write the effective options to <output-dir>/config.toml");

  app.add_option("--corpus", cfg.corpus, "Labeled JSONL corpus (default <output-dir>/corpus.jsonl)");
  app.add_option("--malicious", cfg.malicious_corpus, "Malicious PMI corpus to assemble");
  app.add_option("--benign", cfg.benign_corpus, "Benign PMI corpus to assemble");
  app.add_option("--ratio", cfg.ratio, "balanced or imbalanced (1:10)")->capture_default_str();
  app.add_option("--n-malicious", cfg.n_malicious, "Synthetic malicious count")->capture_default_str();
  app.add_option("--n-benign", cfg.n_benign, "Synthetic benign count")->capture_default_str();
  app.add_option("--profile", cfg.profile, "JSON overrides for the synthetic profile");
  app.add_option("--reference-time", reference_time, "RFC 3339 time used for ages (default: newest record)");
  app.add_option("--ccs-base", cfg.ccs_base, "Logarithm base of the community contribution score")
      ->capture_default_str();

  app.add_option("--feature-sets,--feature-set", cfg.feature_sets, "existing_tec memptec_e memptec_d memptec")
      ->delimiter(',')
      ->capture_default_str();
  app.add_option("--algorithms", cfg.algorithms, "glm svm gbm drf mlp")->delimiter(',')->capture_default_str();
  app.add_option("--split", cfg.split_mode, "repeated or kfold")->capture_default_str();
  app.add_option("--folds", cfg.folds, "Number of splits")->capture_default_str();

  app.add_option("--kind,--attack", cfg.attack_kind, "percentage, topn or information")->capture_default_str();
  app.add_option("--steps", cfg.steps, "Percentages of features to manipulate")
      ->delimiter(',')
      ->capture_default_str();
  app.add_option("--top-n", cfg.top_n, "Largest top-N step")->capture_default_str();
  app.add_option("--ranking,--method", cfg.ranking, "permutation or exact_shapley")->capture_default_str();
  app.add_option("--ranking-repeats", cfg.ranking_repeats, "Permutation repeats")->capture_default_str();
  app.add_option("--attack-scope", cfg.attack_scope, "test or all")->capture_default_str();
  app.add_option("--drift-days", cfg.drift_days, "Temporal drift schedule in days")
      ->delimiter(',')
      ->capture_default_str();
  app.add_option("--drift-counts", cfg.drift_counts, "Interaction drift schedule")
      ->delimiter(',')
      ->capture_default_str();

  app.add_option("--packages", cfg.packages, "Package names to ingest")->delimiter(',');
  app.add_option("--package-list", cfg.package_list, "File with one package name per line");
  app.add_option("--label", cfg.label, "Label for ingested packages: benign or malicious")->capture_default_str();
  app.add_option("--cache-mode", cfg.cache_mode, "offline, cache-first or refresh")->capture_default_str();
  app.add_option("--registry-url", cfg.registry_url)->capture_default_str();
  app.add_option("--repo-api-url", cfg.repo_api_url)->capture_default_str();
  bool offline = false;
  app.add_flag("--offline", offline, "Serve registry documents from the cache only");
  app.add_flag("--fetch-interactions", cfg.fetch_interactions, "Query repository interaction counts");
  app.add_option("--rps", cfg.requests_per_second, "Request rate limit")->capture_default_str();
  app.add_option("--max-concurrent", cfg.max_concurrent, "Concurrent requests")->capture_default_str();

  const std::pair<const char*, const char*> commands[] = {
      {"ingest", "Fetch package metadata from the registry"},
      {"synth", "Generate a synthetic labeled corpus"},
      {"extract", "Compute the feature matrix"},
      {"train", "Split the data and train every model"},
      {"evaluate", "Score trained models on held-out rows"},
      {"attack", "Run feature manipulation attacks"},
      {"drift", "Run temporal and interaction drift"},
      {"report", "Merge results into summary.json"},
      {"catalog", "Print the feature catalog"},
  };
  for (const auto& [name, help] : commands) app.add_subcommand(name, help)->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }
  if (!reference_time.empty()) cfg.reference_time = reference_time;
  if (offline) cfg.cache_mode = "offline";

  const std::string command = app.get_subcommands().front()->get_name();
  const int rc = memptec::RunCommand(command, cfg, std::cout, std::cerr);
  if (rc == 0 && write_config) {
    try {
      std::ofstream(std::string(cfg.output_dir) + "/config.toml") << app.config_to_str(true, false);
    } catch (const std::exception& e) {
      std::cerr << "warning: config.toml not written: " << e.what() << "\n";
    }
  }
  return rc;
}
