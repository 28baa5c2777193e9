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

#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <set>

#include "memptec/adversarial.hpp"
#include "memptec/catalog.hpp"
#include "memptec/dataset.hpp"
#include "memptec/error.hpp"
#include "memptec/features.hpp"
#include "memptec/metrics.hpp"
#include "memptec/models.hpp"
#include "memptec/registry.hpp"
#include "memptec/synth.hpp"
#include "memptec/util.hpp"

namespace memptec {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void Invalid(const std::string& field, const std::string& why) {
  throw Error(ErrorCode::kConfigInvalid, field + ": " + why);
}

template <typename T>
void OneOf(const std::string& field, const T& value, const std::set<T>& allowed) {
  if (!allowed.count(value)) Invalid(field, "unsupported value");
}

}  // namespace

void ValidateRunConfig(const RunConfig& cfg) {
  if (cfg.jobs < 1) Invalid("jobs", "must be >= 1");
  if (cfg.output_dir.empty()) Invalid("output_dir", "must not be empty");
  try {
    ParseRatio(cfg.ratio);
  } catch (const Error&) {
    Invalid("ratio", "expected balanced or imbalanced");
  }
  if (cfg.n_malicious == 0 || cfg.n_benign == 0) Invalid("n_malicious/n_benign", "must be positive");
  if (cfg.malicious_corpus.empty() != cfg.benign_corpus.empty()) {
    Invalid("malicious/benign", "give both corpora or neither");
  }
  if (cfg.reference_time && !ParseTimestamp(*cfg.reference_time)) Invalid("reference_time", "not a timestamp");
  if (!(cfg.ccs_base > 1.0)) Invalid("ccs_base", "must exceed 1");
  if (cfg.feature_sets.empty()) Invalid("feature_sets", "must not be empty");
  for (const auto& f : cfg.feature_sets) {
    const auto& known = FeatureSetNames();
    if (std::find(known.begin(), known.end(), f) == known.end()) Invalid("feature_sets", "unknown set '" + f + "'");
  }
  if (cfg.algorithms.empty()) Invalid("algorithms", "must not be empty");
  for (const auto& a : cfg.algorithms) {
    try {
      ParseAlgorithm(a);
    } catch (const Error&) {
      Invalid("algorithms", "unknown algorithm '" + a + "'");
    }
  }
  OneOf<std::string>("split", cfg.split_mode, {"repeated", "kfold"});
  if (cfg.folds < 2) Invalid("folds", "must be >= 2");
  OneOf<std::string>("attack_kind", cfg.attack_kind, {"percentage", "topn", "information"});
  if (cfg.steps.empty()) Invalid("steps", "must not be empty");
  double prev = 0.0;
  for (double s : cfg.steps) {
    if (!(s > prev && s <= 100.0)) Invalid("steps", "percentages must ascend within (0,100]");
    prev = s;
  }
  if (cfg.top_n < 1) Invalid("top_n", "must be >= 1");
  try {
    ParseRankingMethod(cfg.ranking);
  } catch (const Error&) {
    Invalid("ranking", "expected permutation or exact_shapley");
  }
  if (cfg.ranking_repeats < 1) Invalid("ranking_repeats", "must be >= 1");
  OneOf<std::string>("attack_scope", cfg.attack_scope, {"test", "all"});
  for (const auto* sched : {&cfg.drift_days, &cfg.drift_counts}) {
    std::int64_t last = 0;
    for (std::int64_t v : *sched) {
      if (v < last) Invalid("drift schedule", "must ascend from >= 0");
      last = v;
    }
  }
  OneOf<std::string>("label", cfg.label, {"benign", "malicious"});
  OneOf<std::string>("cache_mode", cfg.cache_mode, {"offline", "cache-first", "refresh"});
  if (!(cfg.requests_per_second > 0.0)) Invalid("rps", "must be positive");
  if (cfg.max_concurrent < 1) Invalid("max_concurrent", "must be >= 1");
}

json ToJson(const RunConfig& c) {
  return {{"seed", c.seed},
          {"output_dir", c.output_dir},
          {"cache_dir", c.cache_dir},
          {"jobs", c.jobs},
          {"corpus", c.corpus},
          {"malicious_corpus", c.malicious_corpus},
          {"benign_corpus", c.benign_corpus},
          {"ratio", c.ratio},
          {"n_malicious", c.n_malicious},
          {"n_benign", c.n_benign},
          {"profile", c.profile},
          {"reference_time", c.reference_time ? json(*c.reference_time) : json(nullptr)},
          {"ccs_base", c.ccs_base},
          {"feature_sets", c.feature_sets},
          {"algorithms", c.algorithms},
          {"split", c.split_mode},
          {"folds", c.folds},
          {"attack_kind", c.attack_kind},
          {"steps", c.steps},
          {"top_n", c.top_n},
          {"ranking", c.ranking},
          {"ranking_repeats", c.ranking_repeats},
          {"attack_scope", c.attack_scope},
          {"drift_days", c.drift_days},
          {"drift_counts", c.drift_counts},
          {"packages", c.packages},
          {"package_list", c.package_list},
          {"label", c.label},
          {"cache_mode", c.cache_mode},
          {"registry_url", c.registry_url},
          {"repo_api_url", c.repo_api_url},
          {"fetch_interactions", c.fetch_interactions},
          {"rps", c.requests_per_second},
          {"max_concurrent", c.max_concurrent}};
}

std::string ConfigHash(const RunConfig& cfg) {
  json j = ToJson(cfg);
  for (const char* k : {"jobs", "output_dir", "cache_dir"}) j.erase(k);
  return HexU64(Fnv1a64(j.dump()));
}

const std::vector<std::string>& Commands() {
  static const std::vector<std::string> c = {"ingest", "synth",  "extract", "train", "evaluate",
                                             "attack", "drift", "report",  "catalog"};
  return c;
}

namespace {

struct Context {
  const RunConfig& cfg;
  std::ostream& out;
  std::ostream& err;
  std::string hash;
  fs::path dir;

  std::string Comment() const {
    return "memptec " MEMPTEC_VERSION " config=" + hash + " seed=" + std::to_string(cfg.seed);
  }
  json Meta() const {
    return {{"tool", "memptec"}, {"version", MEMPTEC_VERSION}, {"config_hash", hash}, {"seed", cfg.seed}};
  }
  void Write(const fs::path& rel, std::string_view content) const {
    const fs::path p = dir / rel;
    fs::create_directories(p.parent_path());
    WriteFileAtomic(p, content);
  }
  void WriteJson(const fs::path& rel, json body) const {
    body["meta"] = Meta();
    Write(rel, body.dump(2) + "\n");
  }
  std::string Require(const fs::path& rel, const char* producer) const {
    const fs::path p = dir / rel;
    if (!fs::exists(p)) {
      throw Error(ErrorCode::kIo, p.string() + " not found; run `memptec " + producer + "` first");
    }
    return ReadFile(p);
  }
};

// ---------------------------------------------------------------------------
// ingest / synth / extract

std::vector<std::string> PackageNames(const RunConfig& cfg) {
  std::vector<std::string> names = cfg.packages;
  if (!cfg.package_list.empty()) {
    for (const auto& line : SplitString(ReadFile(cfg.package_list), '\n')) {
      const std::string name = TrimAscii(line);
      if (!name.empty() && name.front() != '#') names.push_back(name);
    }
  }
  return names;
}

int Ingest(const Context& ctx) {
  const auto names = PackageNames(ctx.cfg);
  if (names.empty()) throw Error(ErrorCode::kConfigInvalid, "packages: nothing to ingest");
  CachePolicy policy;
  policy.cache_dir = ctx.cfg.cache_dir;
  policy.mode = ctx.cfg.cache_mode == "offline"  ? CachePolicy::Mode::kOfflineOnly
                : ctx.cfg.cache_mode == "refresh" ? CachePolicy::Mode::kRefresh
                                                  : CachePolicy::Mode::kCacheFirst;
  FetchBudget budget;
  budget.max_concurrent = ctx.cfg.max_concurrent;
  budget.requests_per_second = ctx.cfg.requests_per_second;
  RegistryClient client(policy, budget, MakeDefaultTransport(), {ctx.cfg.registry_url, ctx.cfg.repo_api_url});

  std::vector<PackageMetadata> fetched;
  for (auto& r : client.FetchPackages(names)) {
    if (!r.metadata) {
      ctx.err << "warning: " << r.name << ": " << r.error << "\n";
      continue;
    }
    fetched.push_back(std::move(*r.metadata));
  }
  if (fetched.empty()) throw Error(ErrorCode::kNetworkUnavailable, "no package could be fetched");
  if (ctx.cfg.fetch_interactions) {
    for (auto& p : fetched) {
      if (!p.github_link) continue;
      try {
        p.interactions = client.FetchRepoInteractions(*p.github_link, &p.warnings);
      } catch (const Error& e) {
        ctx.err << "warning: " << p.package_name << ": " << e.what() << "\n";
      }
    }
  }
  AttachStakeholderHistory(fetched, BuildStakeholderHistory(fetched));
  std::vector<LabeledPMI> labeled;
  const int label = ctx.cfg.label == "malicious" ? 1 : 0;
  for (auto& p : fetched) labeled.push_back({std::move(p), label});
  const std::string file = "ingest_" + ctx.cfg.label + ".jsonl";
  ctx.Write(file, "# " + ctx.Comment() + "\n" + CorpusToJsonl(labeled));
  ctx.out << "ingested " << labeled.size() << "/" << names.size() << " packages -> " << (ctx.dir / file).string()
          << " (" << client.network_calls() << " network calls)\n";
  return 0;
}

int Synth(const Context& ctx) {
  SynthSpec spec;
  spec.n_malicious = ctx.cfg.n_malicious;
  spec.n_benign = ctx.cfg.n_benign;
  spec.seed = ctx.cfg.seed;
  if (!ctx.cfg.profile.empty()) spec.profile = ProfileFromJson(json::parse(ReadFile(ctx.cfg.profile)));
  const auto corpus = Synthesize(spec);
  ctx.Write("corpus.jsonl", "# " + ctx.Comment() + "\n" + CorpusToJsonl(corpus));
  ctx.out << "synthesized " << corpus.size() << " packages (" << spec.n_malicious << " malicious) -> "
          << (ctx.dir / "corpus.jsonl").string() << "\n";
  return 0;
}

std::vector<LabeledPMI> LoadCorpus(const Context& ctx) {
  const auto& cfg = ctx.cfg;
  if (!cfg.malicious_corpus.empty()) {
    auto strip = [](std::vector<LabeledPMI> v) {
      std::vector<PackageMetadata> out;
      for (auto& r : v) out.push_back(std::move(r.metadata));
      return out;
    };
    return Assemble(strip(LoadFixtureCorpus(cfg.malicious_corpus)), strip(LoadFixtureCorpus(cfg.benign_corpus)),
                    ParseRatio(cfg.ratio), cfg.seed);
  }
  if (!cfg.corpus.empty()) return LoadFixtureCorpus(cfg.corpus);
  return ParseCorpus(ctx.Require("corpus.jsonl", "synth"));
}

int Extract(const Context& ctx) {
  const auto corpus = LoadCorpus(ctx);
  const Timestamp ref = ctx.cfg.reference_time ? *ParseTimestamp(*ctx.cfg.reference_time) : DefaultReferenceTime(corpus);
  const FeatureMatrix m = ExtractMatrix(corpus, Catalog(), ref, ctx.cfg.jobs, ctx.cfg.ccs_base);
  ctx.Write("features.csv", MatrixToCsv(m, ctx.Comment() + " reference_time=" + FormatTimestamp(ref)));
  std::size_t malicious = 0;
  for (int y : m.labels()) malicious += y == 1 ? 1 : 0;
  ctx.out << "extracted " << m.rows() << " x " << m.cols() << " (" << malicious << " malicious) at "
          << FormatTimestamp(ref) << " -> " << (ctx.dir / "features.csv").string() << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// train / evaluate

FeatureMatrix LoadFeatures(const Context& ctx) { return MatrixFromCsv(ctx.Require("features.csv", "extract"), Catalog()); }

std::vector<SplitIndices> LoadSplits(const Context& ctx) {
  const json j = json::parse(ctx.Require("splits.json", "train"));
  std::vector<SplitIndices> out;
  for (const auto& s : j.at("splits")) out.push_back(SplitIndicesFromJson(s));
  return out;
}

fs::path ModelPath(const std::string& feature_set, const std::string& algo, std::size_t fold) {
  return fs::path("models") / feature_set / algo / ("fold" + std::to_string(fold) + ".json");
}

struct Job {
  std::string feature_set;
  std::string algorithm;
  std::size_t fold = 0;
};

std::vector<Job> Jobs(const RunConfig& cfg, std::size_t folds) {
  std::vector<Job> jobs;
  for (const auto& f : cfg.feature_sets) {
    for (const auto& a : cfg.algorithms) {
      for (std::size_t k = 0; k < folds; ++k) jobs.push_back({f, a, k});
    }
  }
  return jobs;
}

// Worker count for the outer loop; nested tree parallelism only when the
// outer loop is serial.
int InnerJobs(const RunConfig& cfg, std::size_t tasks) { return tasks > 1 ? 1 : cfg.jobs; }

int TrainCommand(const Context& ctx) {
  const FeatureMatrix full = LoadFeatures(ctx);
  const auto splits = ctx.cfg.split_mode == "kfold" ? KFoldSplits(full.labels(), ctx.cfg.folds, ctx.cfg.seed)
                                                    : RepeatedSplits(full.labels(), ctx.cfg.folds, ctx.cfg.seed);
  json sj = {{"split", ctx.cfg.split_mode}, {"splits", json::array()}};
  for (const auto& s : splits) sj["splits"].push_back(ToJson(s));
  ctx.WriteJson("splits.json", sj);

  const auto jobs = Jobs(ctx.cfg, splits.size());
  ParallelFor(jobs.size(), ctx.cfg.jobs, [&](std::size_t t) {
    const Job& job = jobs[t];
    const FeatureCatalog cat = Subset(Catalog(), FeatureSetSelector(job.feature_set));
    const auto& s = splits[job.fold];
    TrainConfig tc;
    tc.algorithm = ParseAlgorithm(job.algorithm);
    tc.seed = DeriveSeed(ctx.cfg.seed, static_cast<std::uint64_t>(job.fold));
    tc.jobs = InnerJobs(ctx.cfg, jobs.size());
    const TrainedModel m =
        Train(tc, full.SelectRows(s.train).SelectColumns(cat), full.SelectRows(s.valid).SelectColumns(cat));
    ctx.WriteJson(ModelPath(job.feature_set, job.algorithm, job.fold), ModelToJson(m));
  });
  ctx.out << "trained " << jobs.size() << " models (" << ctx.cfg.feature_sets.size() << " feature sets x "
          << ctx.cfg.algorithms.size() << " algorithms x " << splits.size() << " " << ctx.cfg.split_mode
          << " splits)\n";
  return 0;
}

TrainedModel LoadModel(const Context& ctx, const std::string& feature_set, const std::string& algo, std::size_t fold) {
  return ModelFromJson(json::parse(ctx.Require(ModelPath(feature_set, algo, fold), "train")));
}

std::string DisplayName(const std::string& feature_set) {
  if (feature_set == "existing_tec") return "Existing_tec";
  if (feature_set == "memptec_e") return "MeMPtec_E";
  if (feature_set == "memptec_d") return "MeMPtec_D";
  return "MeMPtec";
}

int Evaluate(const Context& ctx) {
  const FeatureMatrix full = LoadFeatures(ctx);
  const auto splits = LoadSplits(ctx);
  const auto jobs = Jobs(ctx.cfg, splits.size());
  std::vector<MetricSet> results(jobs.size());
  ParallelFor(jobs.size(), ctx.cfg.jobs, [&](std::size_t t) {
    const Job& job = jobs[t];
    const FeatureCatalog cat = Subset(Catalog(), FeatureSetSelector(job.feature_set));
    const FeatureMatrix test = full.SelectRows(splits[job.fold].test).SelectColumns(cat);
    const TrainedModel m = LoadModel(ctx, job.feature_set, job.algorithm, job.fold);
    results[t] = Metrics(PredictProba(m, test), test.labels());
  });

  std::size_t malicious = 0;
  for (int y : full.labels()) malicious += y == 1 ? 1 : 0;
  json entries = json::array();
  std::string csv = "# " + ctx.Comment() + "\nfeature_set,algorithm,n_features,fold";
  for (const auto& name : MetricNames()) csv += "," + name;
  csv += "\n";
  auto csv_row = [&](const std::string& fset, const std::string& algo, std::size_t nf, const std::string& fold,
                     auto value) {
    csv += fset + "," + algo + "," + std::to_string(nf) + "," + fold;
    for (const auto& name : MetricNames()) csv += "," + FormatNumber(value(name));
    csv += "\n";
  };
  ctx.out << "feature_set      algorithm  n_features  accuracy (mean +- se)  f1\n";
  std::size_t t = 0;
  for (const auto& fset : ctx.cfg.feature_sets) {
    const std::size_t nf = Subset(Catalog(), FeatureSetSelector(fset)).size();
    for (const auto& algo : ctx.cfg.algorithms) {
      std::vector<MetricSet> folds(results.begin() + static_cast<std::ptrdiff_t>(t),
                                   results.begin() + static_cast<std::ptrdiff_t>(t + splits.size()));
      t += splits.size();
      const AggregateResult agg = Aggregate(folds);
      json fj = json::array();
      for (std::size_t k = 0; k < folds.size(); ++k) {
        fj.push_back(ToJson(folds[k]));
        csv_row(fset, algo, nf, std::to_string(k), [&](const std::string& n) { return MetricValue(folds[k], n); });
      }
      json ms = json::object();
      for (const auto& [name, v] : agg.metrics) ms[name] = {{"mean", v.mean}, {"standard_error", v.standard_error}};
      csv_row(fset, algo, nf, "mean", [&](const std::string& n) { return agg.metrics.at(n).mean; });
      csv_row(fset, algo, nf, "se", [&](const std::string& n) { return agg.metrics.at(n).standard_error; });
      entries.push_back({{"feature_set", fset},
                         {"display_name", DisplayName(fset)},
                         {"n_features", nf},
                         {"algorithm", algo},
                         {"folds", fj},
                         {"mean_se", ms},
                         {"warnings", agg.warnings}});
      char line[160];
      std::snprintf(line, sizeof(line), "%-16s %-10s %10zu  %.4f +- %.4f       %.4f\n", fset.c_str(), algo.c_str(),
                    nf, agg.metrics.at("accuracy").mean, agg.metrics.at("accuracy").standard_error,
                    agg.metrics.at("f1").mean);
      ctx.out << line;
    }
  }
  ctx.WriteJson("report.json", {{"dataset",
                                 {{"rows", full.rows()},
                                  {"malicious", malicious},
                                  {"benign", full.rows() - malicious},
                                  {"split", ctx.cfg.split_mode},
                                  {"folds", splits.size()}}},
                                {"entries", entries}});
  ctx.Write("report.csv", csv);
  return 0;
}

// ---------------------------------------------------------------------------
// attack / drift

struct AttackInputs {
  FeatureMatrix target;  // rows under attack, full catalog
  FeatureMatrix pool;    // benign training rows, full catalog
};

AttackInputs AttackRows(const Context& ctx, const FeatureMatrix& full, const SplitIndices& split) {
  std::vector<std::size_t> benign;
  for (std::size_t i : split.train) {
    if (full.label(i) == 0) benign.push_back(i);
  }
  if (ctx.cfg.attack_scope == "all") return {full, full.SelectRows(benign)};
  return {full.SelectRows(split.test), full.SelectRows(benign)};
}

int Attack(const Context& ctx) {
  const FeatureMatrix full = LoadFeatures(ctx);
  const auto splits = LoadSplits(ctx);
  const AttackInputs in = AttackRows(ctx, full, splits.front());
  const auto jobs = Jobs(ctx.cfg, 1);
  std::vector<AttackCurve> curves(jobs.size());
  std::vector<ImportanceRanking> rankings(jobs.size());
  const RankingMethod method = ParseRankingMethod(ctx.cfg.ranking);
  ParallelFor(jobs.size(), ctx.cfg.jobs, [&](std::size_t t) {
    const Job& job = jobs[t];
    const FeatureCatalog cat = Subset(Catalog(), FeatureSetSelector(job.feature_set));
    const FeatureMatrix target = in.target.SelectColumns(cat);
    const TrainedModel m = LoadModel(ctx, job.feature_set, job.algorithm, 0);
    const std::uint64_t seed = DeriveSeed(ctx.cfg.seed, "attack");
    rankings[t] = RankFeatures(m, target, method, seed, ctx.cfg.ranking_repeats, 1);
    AttackCurve c;
    if (ctx.cfg.attack_kind == "percentage") {
      std::vector<double> fractions;
      for (double s : ctx.cfg.steps) fractions.push_back(s / 100.0);
      c = AttackPercentage(m, target, in.pool, rankings[t], fractions, seed);
    } else if (ctx.cfg.attack_kind == "topn") {
      c = AttackTopN(m, target, in.pool, rankings[t], std::min<std::size_t>(ctx.cfg.top_n, cat.size()), seed);
    } else {
      c = AttackInformation(m, target, in.pool, InformationGrouping(cat), rankings[t], seed);
    }
    c.model = job.algorithm;
    c.feature_set = job.feature_set;
    curves[t] = std::move(c);
  });

  json summary = json::array();
  json ranking_json = json::array();
  ctx.out << "feature_set      algorithm  baseline_acc  final_acc (" << ctx.cfg.attack_kind << ")\n";
  for (std::size_t t = 0; t < jobs.size(); ++t) {
    const auto& c = curves[t];
    ctx.Write(fs::path("attacks") / (c.kind + "_" + c.feature_set + "_" + c.model + ".csv"),
              AttackCurveCsv(c, ctx.Comment()));
    json r = ToJson(rankings[t]);
    r["feature_set"] = c.feature_set;
    r["algorithm"] = c.model;
    ranking_json.push_back(r);
    summary.push_back({{"feature_set", c.feature_set},
                       {"algorithm", c.model},
                       {"kind", c.kind},
                       {"baseline_accuracy", c.baseline.accuracy},
                       {"final_accuracy", c.steps.back().metrics.accuracy}});
    char line[160];
    std::snprintf(line, sizeof(line), "%-16s %-10s %12.4f  %9.4f\n", c.feature_set.c_str(), c.model.c_str(),
                  c.baseline.accuracy, c.steps.back().metrics.accuracy);
    ctx.out << line;
  }
  ctx.WriteJson(fs::path("attacks") / "rankings.json", {{"rankings", ranking_json}});
  ctx.WriteJson(fs::path("attacks") / ("summary_" + ctx.cfg.attack_kind + ".json"),
                {{"scope", ctx.cfg.attack_scope}, {"entries", summary}});
  return 0;
}

int Drift(const Context& ctx) {
  const FeatureMatrix full = LoadFeatures(ctx);
  const auto splits = LoadSplits(ctx);
  const AttackInputs in = AttackRows(ctx, full, splits.front());
  const auto jobs = Jobs(ctx.cfg, 1);
  std::vector<AttackCurve> temporal(jobs.size());
  std::vector<AttackCurve> interaction(jobs.size());
  ParallelFor(jobs.size(), ctx.cfg.jobs, [&](std::size_t t) {
    const Job& job = jobs[t];
    const FeatureCatalog cat = Subset(Catalog(), FeatureSetSelector(job.feature_set));
    const FeatureMatrix target = in.target.SelectColumns(cat);
    const TrainedModel m = LoadModel(ctx, job.feature_set, job.algorithm, 0);
    temporal[t] = DriftTemporal(m, target, ctx.cfg.drift_days);
    interaction[t] = DriftInteraction(m, target, ctx.cfg.drift_counts);
    for (auto* c : {&temporal[t], &interaction[t]}) {
      c->model = job.algorithm;
      c->feature_set = job.feature_set;
    }
  });
  json summary = json::array();
  for (std::size_t t = 0; t < jobs.size(); ++t) {
    for (const auto* c : {&temporal[t], &interaction[t]}) {
      const std::string kind = c == &temporal[t] ? "temporal" : "interaction";
      ctx.Write(fs::path("drift") / (kind + "_" + c->feature_set + "_" + c->model + ".csv"),
                AttackCurveCsv(*c, ctx.Comment()));
      summary.push_back({{"feature_set", c->feature_set},
                         {"algorithm", c->model},
                         {"kind", c->kind},
                         {"baseline_accuracy", c->baseline.accuracy},
                         {"final_accuracy", c->steps.back().metrics.accuracy}});
    }
  }
  ctx.WriteJson(fs::path("drift") / "summary.json", {{"entries", summary}});
  ctx.out << "wrote " << 2 * jobs.size() << " drift curves -> " << (ctx.dir / "drift").string() << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// report / catalog

int Report(const Context& ctx) {
  const json report = json::parse(ctx.Require("report.json", "evaluate"));
  json summary = {{"dataset", report.at("dataset")}, {"evaluation", json::array()}};
  for (const auto& e : report.at("entries")) {
    summary["evaluation"].push_back({{"feature_set", e.at("feature_set")},
                                     {"algorithm", e.at("algorithm")},
                                     {"n_features", e.at("n_features")},
                                     {"mean_se", e.at("mean_se")}});
  }
  json attacks = json::object();
  const fs::path attack_dir = ctx.dir / "attacks";
  if (fs::exists(attack_dir)) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(attack_dir)) {
      const std::string name = entry.path().filename().string();
      if (name.rfind("summary_", 0) == 0) files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
      const json j = json::parse(ReadFile(f));
      attacks[f.stem().string().substr(8)] = j.at("entries");
    }
  }
  summary["attacks"] = attacks;
  const fs::path drift = ctx.dir / "drift" / "summary.json";
  summary["drift"] = fs::exists(drift) ? json::parse(ReadFile(drift)).at("entries") : json::array();
  ctx.WriteJson("summary.json", summary);
  ctx.out << "merged " << summary["evaluation"].size() << " evaluation rows, " << attacks.size()
          << " attack kinds -> " << (ctx.dir / "summary.json").string() << "\n";
  return 0;
}

int CatalogCommand(const Context& ctx) {
  ctx.out << CatalogCsv(Catalog());
  for (const auto& name : FeatureSetNames()) {
    ctx.out << "# " << name << ": " << Subset(Catalog(), FeatureSetSelector(name)).size() << " features\n";
  }
  return 0;
}

bool IsValidationError(ErrorCode code) {
  switch (code) {
    case ErrorCode::kConfigInvalid:
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kBadProfile:
    case ErrorCode::kBadHyperparam:
    case ErrorCode::kUnknownFeature:
    case ErrorCode::kBadBase:
    case ErrorCode::kTooManyFeaturesForExact: return true;
    default: return false;
  }
}

}  // namespace

int RunCommand(const std::string& command, const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    ValidateRunConfig(cfg);
    const Context ctx{cfg, out, err, ConfigHash(cfg), fs::path(cfg.output_dir)};
    if (command == "ingest") return Ingest(ctx);
    if (command == "synth") return Synth(ctx);
    if (command == "extract") return Extract(ctx);
    if (command == "train") return TrainCommand(ctx);
    if (command == "evaluate") return Evaluate(ctx);
    if (command == "attack") return Attack(ctx);
    if (command == "drift") return Drift(ctx);
    if (command == "report") return Report(ctx);
    if (command == "catalog") return CatalogCommand(ctx);
    throw Error(ErrorCode::kConfigInvalid, "unknown command '" + command + "'");
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return IsValidationError(e.code()) ? 1 : 2;
  } catch (const json::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace memptec
