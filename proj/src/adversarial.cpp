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

#include "memptec/adversarial.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <set>

#include "memptec/error.hpp"
#include "memptec/util.hpp"

namespace memptec {

using nlohmann::json;

std::string_view RankingMethodName(RankingMethod method) {
  return method == RankingMethod::kPermutation ? "permutation" : "exact_shapley";
}

RankingMethod ParseRankingMethod(std::string_view name) {
  if (name == "permutation") return RankingMethod::kPermutation;
  if (name == "exact_shapley" || name == "shapley") return RankingMethod::kExactShapley;
  throw Error(ErrorCode::kInvalidArgument, "unknown ranking method '" + std::string(name) + "'");
}

std::vector<std::string> ImportanceRanking::Names() const {
  std::vector<std::string> out;
  for (const auto& [name, score] : entries) out.push_back(name);
  return out;
}

namespace {

double Accuracy(const TrainedModel& model, const FeatureMatrix& x) {
  return Metrics(PredictProba(model, x), x.labels()).accuracy;
}

std::vector<std::size_t> ShuffledRows(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  Rng rng(seed);
  rng.Shuffle(perm);
  return perm;
}

void PermuteColumn(FeatureMatrix& x, const FeatureMatrix& source, std::size_t j, const std::vector<std::size_t>& perm) {
  for (std::size_t i = 0; i < x.rows(); ++i) x.At(i, j) = source.At(perm[i], j);
}

ImportanceRanking Ordered(RankingMethod method, std::uint64_t seed, const FeatureCatalog& cat,
                          const std::vector<double>& scores) {
  std::vector<std::size_t> order(cat.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  ImportanceRanking r;
  r.method = method;
  r.seed = seed;
  for (std::size_t j : order) r.entries.emplace_back(cat[j].name, std::max(0.0, scores[j]));
  return r;
}

}  // namespace

std::vector<double> ExactShapley(const TrainedModel& model, const FeatureMatrix& x, std::uint64_t seed) {
  const std::size_t f = x.cols();
  if (f > 12) {
    throw Error(ErrorCode::kTooManyFeaturesForExact, std::to_string(f) + " features; exact Shapley allows 12");
  }
  if (x.empty()) throw Error(ErrorCode::kInvalidArgument, "empty matrix");
  std::vector<std::vector<std::size_t>> perms;
  for (std::size_t j = 0; j < f; ++j) perms.push_back(ShuffledRows(x.rows(), DeriveSeed(seed, "shapley-" + x.catalog()[j].name)));

  const std::size_t n_coalitions = std::size_t{1} << f;
  std::vector<double> value(n_coalitions);
  for (std::size_t mask = 0; mask < n_coalitions; ++mask) {
    FeatureMatrix m = x;
    for (std::size_t j = 0; j < f; ++j) {
      if (!(mask & (std::size_t{1} << j))) PermuteColumn(m, x, j, perms[j]);
    }
    value[mask] = Accuracy(model, m);
  }
  // weight(|S|) = |S|! (F - |S| - 1)! / F!
  std::vector<double> fact(f + 1, 1.0);
  for (std::size_t k = 1; k <= f; ++k) fact[k] = fact[k - 1] * static_cast<double>(k);
  std::vector<double> phi(f, 0.0);
  for (std::size_t j = 0; j < f; ++j) {
    const std::size_t bit = std::size_t{1} << j;
    for (std::size_t mask = 0; mask < n_coalitions; ++mask) {
      if (mask & bit) continue;
      const auto s = static_cast<std::size_t>(std::popcount(mask));
      phi[j] += fact[s] * fact[f - s - 1] / fact[f] * (value[mask | bit] - value[mask]);
    }
  }
  return phi;
}

ImportanceRanking RankFeatures(const TrainedModel& model, const FeatureMatrix& x, RankingMethod method,
                               std::uint64_t seed, int repeats, int jobs) {
  if (x.empty()) throw Error(ErrorCode::kInvalidArgument, "cannot rank features on an empty matrix");
  if (method == RankingMethod::kExactShapley) {
    return Ordered(method, seed, x.catalog(), ExactShapley(model, x, seed));
  }
  if (repeats < 1) throw Error(ErrorCode::kInvalidArgument, "repeats must be >= 1");
  const double base = Accuracy(model, x);
  std::vector<double> scores(x.cols(), 0.0);
  ParallelFor(x.cols(), jobs, [&](std::size_t j) {
    FeatureMatrix m = x;
    double drop = 0.0;
    for (int r = 0; r < repeats; ++r) {
      const auto perm = ShuffledRows(x.rows(), DeriveSeed(DeriveSeed(seed, "perm-" + x.catalog()[j].name),
                                                          static_cast<std::uint64_t>(r)));
      PermuteColumn(m, x, j, perm);
      drop += base - Accuracy(model, m);
    }
    scores[j] = drop / repeats;
  });
  return Ordered(method, seed, x.catalog(), scores);
}

FeatureMatrix ManipulateFeature(const FeatureMatrix& x, std::string_view feature, const FeatureMatrix& benign_pool,
                                std::uint64_t seed) {
  const std::string name(feature);
  return ManipulateFeatures(x, std::span<const std::string>(&name, 1), benign_pool, seed);
}

FeatureMatrix ManipulateFeatures(const FeatureMatrix& x, std::span<const std::string> features,
                                 const FeatureMatrix& benign_pool, std::uint64_t seed) {
  if (benign_pool.empty()) throw Error(ErrorCode::kEmptyPool, "benign pool has no rows");
  FeatureMatrix out = x;
  for (const auto& feature : features) {
    const std::size_t j = x.catalog().IndexOf(feature);
    const std::size_t pj = benign_pool.catalog().IndexOf(feature);
    Rng rng(DeriveSeed(seed, "manipulate-" + feature));
    for (std::size_t i = 0; i < out.rows(); ++i) {
      if (out.label(i) != 1) continue;
      out.At(i, j) = benign_pool.At(rng.Index(benign_pool.rows()), pj);
    }
  }
  return out;
}

FeatureMatrix DriftTemporalMatrix(const FeatureMatrix& x, std::int64_t days, double ccs_base) {
  if (days < 0) throw Error(ErrorCode::kInvalidArgument, "drift days must be >= 0");
  FeatureMatrix out = x;
  const auto& cat = x.catalog();
  const double d = static_cast<double>(days);
  std::set<std::string> service_features;
  for (const char* role : {"author", "maintainer", "contributor", "publisher"}) {
    service_features.insert(std::string(role) + "_service_time");
  }
  for (std::size_t i = 0; i < out.rows(); ++i) {
    if (out.label(i) != 1) continue;
    for (std::size_t j = 0; j < cat.size(); ++j) {
      if (cat[j].value_kind != ValueKind::kDurationDays || service_features.count(cat[j].name)) continue;
      out.At(i, j) += d;
    }
    for (const char* role : {"author", "maintainer", "contributor", "publisher"}) {
      const std::string r(role);
      const auto st = cat.Find(r + "_service_time");
      const auto cpn = cat.Find(r + "_CPN");
      const auto ccs = cat.Find(r + "_CCS");
      // A stakeholder is present when its CPN is positive; without a CPN
      // column, when it has any service time.
      const bool present = cpn ? out.At(i, *cpn) > 0 : (st && out.At(i, *st) > 0);
      if (!present) continue;
      if (st) out.At(i, *st) += d;
      if (ccs && cpn) {
        double service = 0.0;
        if (st) {
          service = out.At(i, *st);
        } else {
          // Recover the service time from the score before shifting it.
          const double lc = std::log1p(out.At(i, *cpn)) / std::log(ccs_base);
          service = std::pow(ccs_base, out.At(i, *ccs) / lc) - 1.0 + d;
        }
        out.At(i, *ccs) = Ccs(std::max(0.0, service), out.At(i, *cpn), ccs_base);
      }
    }
  }
  return out;
}

FeatureMatrix DriftInteractionMatrix(const FeatureMatrix& x, std::int64_t count) {
  if (count < 0) throw Error(ErrorCode::kInvalidArgument, "drift count must be >= 0");
  FeatureMatrix out = x;
  std::vector<std::size_t> cols;
  for (const char* name : {"pull_request", "issues", "fork_number", "star", "subscriber_count"}) {
    if (auto j = x.catalog().Find(name)) cols.push_back(*j);
  }
  for (std::size_t i = 0; i < out.rows(); ++i) {
    if (out.label(i) != 1) continue;
    for (std::size_t j : cols) out.At(i, j) += static_cast<double>(count);
  }
  return out;
}

namespace {

MetricSet Evaluate(const TrainedModel& model, const FeatureMatrix& x) {
  return Metrics(PredictProba(model, x), x.labels());
}

AttackCurve StartCurve(std::string kind, const TrainedModel& model, const FeatureMatrix& test) {
  AttackCurve c;
  c.kind = std::move(kind);
  c.baseline = Evaluate(model, test);
  c.steps.push_back({"baseline", {}, c.baseline});
  return c;
}

// Appends one step per prefix length in `prefixes` of the ordered feature list.
AttackCurve CumulativeCurve(std::string kind, const TrainedModel& model, const FeatureMatrix& test,
                            const FeatureMatrix& pool, const std::vector<std::string>& order,
                            const std::vector<std::pair<std::string, std::size_t>>& prefixes, std::uint64_t seed) {
  AttackCurve c = StartCurve(std::move(kind), model, test);
  FeatureMatrix current = test;
  std::size_t done = 0;
  for (const auto& [id, k] : prefixes) {
    for (; done < k; ++done) current = ManipulateFeature(current, order[done], pool, seed);
    c.steps.push_back({id, std::vector<std::string>(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k)),
                       Evaluate(model, current)});
  }
  return c;
}

std::vector<std::string> CheckedOrder(const ImportanceRanking& ranking, const FeatureMatrix& test) {
  auto order = ranking.Names();
  std::set<std::string> seen(order.begin(), order.end());
  if (order.size() != test.cols() || seen.size() != order.size()) {
    throw Error(ErrorCode::kInvalidArgument, "ranking must cover the test catalog exactly once");
  }
  for (const auto& name : order) test.catalog().IndexOf(name);
  return order;
}

}  // namespace

AttackCurve AttackPercentage(const TrainedModel& model, const FeatureMatrix& test, const FeatureMatrix& benign_pool,
                             const ImportanceRanking& ranking, std::span<const double> fractions, std::uint64_t seed) {
  const auto order = CheckedOrder(ranking, test);
  std::vector<std::pair<std::string, std::size_t>> prefixes;
  double prev = 0.0;
  for (double f : fractions) {
    if (!(f > prev && f <= 1.0)) throw Error(ErrorCode::kInvalidArgument, "fractions must ascend within (0,1]");
    prev = f;
    const auto k = static_cast<std::size_t>(std::ceil(f * static_cast<double>(order.size()) - 1e-9));
    prefixes.emplace_back(FormatNumber(f), std::min(k, order.size()));
  }
  return CumulativeCurve("percentage", model, test, benign_pool, order, prefixes, seed);
}

AttackCurve AttackTopN(const TrainedModel& model, const FeatureMatrix& test, const FeatureMatrix& benign_pool,
                       const ImportanceRanking& ranking, std::size_t n_max, std::uint64_t seed) {
  const auto order = CheckedOrder(ranking, test);
  if (n_max > order.size()) throw Error(ErrorCode::kInvalidArgument, "n_max exceeds the catalog size");
  std::vector<std::pair<std::string, std::size_t>> prefixes;
  for (std::size_t n = 1; n <= n_max; ++n) prefixes.emplace_back("top" + std::to_string(n), n);
  return CumulativeCurve("topn", model, test, benign_pool, order, prefixes, seed);
}

AttackCurve AttackInformation(const TrainedModel& model, const FeatureMatrix& test, const FeatureMatrix& benign_pool,
                              const std::map<std::string, std::vector<std::string>>& grouping,
                              const ImportanceRanking& ranking, std::uint64_t seed) {
  const auto& cat = test.catalog();
  std::vector<int> owner(cat.size(), -1);
  std::vector<std::string> keys;
  for (const auto& [key, members] : grouping) {
    const int g = static_cast<int>(keys.size());
    keys.push_back(key);
    for (const auto& name : members) {
      const std::size_t j = cat.IndexOf(name);
      if (owner[j] >= 0) throw Error(ErrorCode::kIncompleteGrouping, "feature '" + name + "' is in two groups");
      owner[j] = g;
    }
  }
  for (std::size_t j = 0; j < cat.size(); ++j) {
    if (owner[j] < 0) throw Error(ErrorCode::kIncompleteGrouping, "feature '" + cat[j].name + "' has no group");
  }
  std::map<std::string, double> score;
  for (const auto& [name, s] : ranking.entries) score[name] = s;

  struct Group {
    std::string key;
    double importance = 0.0;
    std::size_t first = 0;  // lowest catalog index, for ties
    std::vector<std::string> members;  // catalog order
  };
  std::vector<Group> groups(keys.size());
  for (std::size_t g = 0; g < keys.size(); ++g) {
    groups[g].key = keys[g];
    groups[g].first = cat.size();
  }
  for (std::size_t j = 0; j < cat.size(); ++j) {
    Group& g = groups[static_cast<std::size_t>(owner[j])];
    g.importance += score.count(cat[j].name) ? score[cat[j].name] : 0.0;
    g.first = std::min(g.first, j);
    g.members.push_back(cat[j].name);
  }
  std::erase_if(groups, [](const Group& g) { return g.members.empty(); });
  std::stable_sort(groups.begin(), groups.end(), [](const Group& a, const Group& b) {
    return a.importance > b.importance || (a.importance == b.importance && a.first < b.first);
  });

  std::vector<std::string> order;
  std::vector<std::pair<std::string, std::size_t>> prefixes;
  for (const auto& g : groups) {
    order.insert(order.end(), g.members.begin(), g.members.end());
    prefixes.emplace_back(g.key, order.size());
  }
  return CumulativeCurve("information", model, test, benign_pool, order, prefixes, seed);
}

AttackCurve DriftTemporal(const TrainedModel& model, const FeatureMatrix& test, std::span<const std::int64_t> days) {
  AttackCurve c = StartCurve("drift_temporal", model, test);
  std::int64_t prev = -1;
  for (std::int64_t d : days) {
    if (d < 0 || d < prev) throw Error(ErrorCode::kInvalidArgument, "day schedule must be ascending and >= 0");
    prev = d;
    c.steps.push_back({"d=" + std::to_string(d), {}, Evaluate(model, DriftTemporalMatrix(test, d))});
  }
  return c;
}

AttackCurve DriftInteraction(const TrainedModel& model, const FeatureMatrix& test,
                             std::span<const std::int64_t> counts) {
  AttackCurve c = StartCurve("drift_interaction", model, test);
  std::int64_t prev = -1;
  for (std::int64_t n : counts) {
    if (n < 0 || n < prev) throw Error(ErrorCode::kInvalidArgument, "count schedule must be ascending and >= 0");
    prev = n;
    c.steps.push_back({"c=" + std::to_string(n), {}, Evaluate(model, DriftInteractionMatrix(test, n))});
  }
  return c;
}

std::string AttackCurveCsv(const AttackCurve& curve, std::string_view comment) {
  static const char* kMetrics[] = {"precision", "recall", "f1", "accuracy", "rmse", "fp", "fn"};
  std::string out;
  if (!comment.empty()) {
    out += "# ";
    out += comment;
    out += '\n';
  }
  out += "model,feature_set,attack_kind,step_id,manipulated_count";
  for (const char* name : kMetrics) out += std::string(",") + name;
  out += ",manipulated\n";
  for (const auto& step : curve.steps) {
    out += curve.model + "," + curve.feature_set + "," + curve.kind + "," + step.step_id + "," +
           std::to_string(step.manipulated.size());
    for (const char* name : kMetrics) out += "," + FormatNumber(MetricValue(step.metrics, name));
    out += ",";
    for (std::size_t k = 0; k < step.manipulated.size(); ++k) {
      if (k > 0) out += ';';
      out += step.manipulated[k];
    }
    out += '\n';
  }
  return out;
}

json ToJson(const AttackCurve& curve) {
  json steps = json::array();
  for (const auto& s : curve.steps) {
    steps.push_back({{"step_id", s.step_id}, {"manipulated", s.manipulated}, {"metrics", ToJson(s.metrics)}});
  }
  return {{"kind", curve.kind},
          {"model", curve.model},
          {"feature_set", curve.feature_set},
          {"baseline", ToJson(curve.baseline)}, {"steps", steps}};
}

json ToJson(const ImportanceRanking& ranking) {
  json entries = json::array();
  for (const auto& [name, score] : ranking.entries) entries.push_back({{"feature", name}, {"score", score}});
  return {{"method", RankingMethodName(ranking.method)}, {"seed", ranking.seed}, {"entries", entries}};
}

}  // namespace memptec
