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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>
#include <set>

#include "memptec/dataset.hpp"
#include "memptec/synth.hpp"
#include "test_support.hpp"

namespace memptec {
namespace {

using test::CodeOf;

TrainedModel Linear(std::vector<double> w, double bias, const FeatureCatalog& cat) {
  TrainedModel m;
  m.algorithm = Algorithm::kGlm;
  m.catalog_fingerprint = cat.Fingerprint();
  m.feature_names = cat.Names();
  m.params = LinearParams{std::move(w), bias, 1.0, 0.0};
  return m;
}

// Sharp threshold on feature k at 0.5.
TrainedModel ThresholdModel(std::size_t k, std::size_t f) {
  std::vector<double> w(f, 0.0);
  w[k] = 200.0;
  return Linear(w, -100.0, test::ToyCatalog(f));
}

double Accuracy(const TrainedModel& m, const FeatureMatrix& x) { return Metrics(PredictProba(m, x), x.labels()).accuracy; }

// Coalition value with absent features replaced by their fixed seeded column
// shuffle.
double CoalitionValue(const TrainedModel& m, const FeatureMatrix& x, std::uint64_t seed, std::size_t mask) {
  FeatureMatrix out = x;
  for (std::size_t j = 0; j < x.cols(); ++j) {
    if (mask & (std::size_t{1} << j)) continue;
    std::vector<std::size_t> perm(x.rows());
    std::iota(perm.begin(), perm.end(), 0);
    Rng rng(DeriveSeed(seed, "shapley-" + x.catalog()[j].name));
    rng.Shuffle(perm);
    for (std::size_t i = 0; i < x.rows(); ++i) out.At(i, j) = x.At(perm[i], j);
  }
  return Accuracy(m, out);
}

// Shapley values averaged over all feature orderings.
std::vector<double> OrderingShapley(const TrainedModel& m, const FeatureMatrix& x, std::uint64_t seed) {
  const std::size_t f = x.cols();
  std::vector<std::size_t> order(f);
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> phi(f, 0.0);
  double orderings = 0.0;
  do {
    std::size_t mask = 0;
    double prev = CoalitionValue(m, x, seed, 0);
    for (std::size_t j : order) {
      mask |= std::size_t{1} << j;
      const double v = CoalitionValue(m, x, seed, mask);
      phi[j] += v - prev;
      prev = v;
    }
    orderings += 1.0;
  } while (std::next_permutation(order.begin(), order.end()));
  for (auto& p : phi) p /= orderings;
  return phi;
}

struct ToyCase {
  std::string label;
  TrainedModel model;
  FeatureMatrix x;
};

// Three-feature battery: hand-set thresholds and trained models, each with a
// single informative feature.
std::vector<ToyCase> Battery() {
  std::vector<ToyCase> cases;
  for (std::size_t k = 0; k < 3; ++k) {
    auto x = test::ThresholdToy(150, 3, k, 40 + k);
    cases.push_back({"threshold-f" + std::to_string(k), ThresholdModel(k, 3), x});
    for (auto a : {Algorithm::kGlm, Algorithm::kGbm, Algorithm::kDrf}) {
      TrainConfig cfg;
      cfg.algorithm = a;
      cfg.seed = k;
      if (a == Algorithm::kDrf) cfg.hyperparams = {{"n_trees", 15}};
      if (a == Algorithm::kGbm) cfg.hyperparams = {{"n_trees", 20}};
      const auto train = test::ThresholdToy(300, 3, k, 90 + k);
      cases.push_back({std::string(AlgorithmName(a)) + "-f" + std::to_string(k),
                       Train(cfg, train, FeatureMatrix(train.catalog())), x});
    }
  }
  return cases;
}

TEST(ExactShapley, MatchesOrderingOracleAndEfficiency) {
  for (const auto& c : Battery()) {
    const auto phi = ExactShapley(c.model, c.x, 5);
    const auto oracle = OrderingShapley(c.model, c.x, 5);
    ASSERT_EQ(phi.size(), 3u);
    for (std::size_t j = 0; j < 3; ++j) EXPECT_NEAR(phi[j], oracle[j], 1e-12) << c.label;
    const double total = std::accumulate(phi.begin(), phi.end(), 0.0);
    EXPECT_NEAR(total + CoalitionValue(c.model, c.x, 5, 0), Accuracy(c.model, c.x), 1e-9) << c.label;
  }
}

TEST(RankFeatures, PermutationAgreesWithShapleyOnTopFeature) {
  for (const auto& c : Battery()) {
    const auto perm = RankFeatures(c.model, c.x, RankingMethod::kPermutation, 3);
    const auto shap = RankFeatures(c.model, c.x, RankingMethod::kExactShapley, 3);
    EXPECT_EQ(perm.entries.front().first, shap.entries.front().first) << c.label;
    EXPECT_EQ(perm.entries.front().first, c.label.substr(c.label.size() - 2)) << c.label;
  }
}

TEST(RankFeatures, ConstantModelScoresZeroInCatalogOrder) {
  const auto x = test::ThresholdToy(60, 4, 1, 2);
  const auto m = Linear({0, 0, 0, 0}, 0.0, x.catalog());
  for (auto method : {RankingMethod::kPermutation, RankingMethod::kExactShapley}) {
    const auto r = RankFeatures(m, x, method, 1);
    EXPECT_EQ(r.Names(), x.catalog().Names());
    for (const auto& [name, score] : r.entries) EXPECT_EQ(score, 0.0);
  }
}

TEST(RankFeatures, SeededAndCoversCatalog) {
  const auto x = test::ThresholdToy(120, 6, 4, 8);
  const auto m = ThresholdModel(4, 6);
  const auto a = RankFeatures(m, x, RankingMethod::kPermutation, 11);
  EXPECT_EQ(a.entries, RankFeatures(m, x, RankingMethod::kPermutation, 11).entries);
  EXPECT_EQ(a.entries, RankFeatures(m, x, RankingMethod::kPermutation, 11, 10, 4).entries);
  auto names = a.Names();
  std::sort(names.begin(), names.end());
  auto expected = x.catalog().Names();
  std::sort(expected.begin(), expected.end());
  EXPECT_EQ(names, expected);
  for (std::size_t i = 1; i < a.entries.size(); ++i) EXPECT_GE(a.entries[i - 1].second, a.entries[i].second);
}

TEST(RankFeaturesProperty, SingleUsedFeatureStrictlyFirst) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const std::size_t k = seed % 5;
    const auto x = test::ThresholdToy(100, 5, k, 200 + seed);
    const auto r = RankFeatures(ThresholdModel(k, 5), x, RankingMethod::kPermutation, seed);
    EXPECT_EQ(r.entries[0].first, "f" + std::to_string(k));
    EXPECT_GT(r.entries[0].second, r.entries[1].second);
  }
}

TEST(RankFeatures, Errors) {
  const auto big = test::ThresholdToy(20, 13, 0, 1);
  const auto m = ThresholdModel(0, 13);
  EXPECT_EQ(CodeOf([&] { RankFeatures(m, big, RankingMethod::kExactShapley, 1); }),
            ErrorCode::kTooManyFeaturesForExact);
  EXPECT_EQ(CodeOf([&] { RankFeatures(m, FeatureMatrix(big.catalog()), RankingMethod::kPermutation, 1); }),
            ErrorCode::kInvalidArgument);
  EXPECT_EQ(ParseRankingMethod("shapley"), RankingMethod::kExactShapley);
  EXPECT_EQ(ParseRankingMethod(RankingMethodName(RankingMethod::kPermutation)), RankingMethod::kPermutation);
}

FeatureMatrix Pool(const FeatureCatalog& cat, double value, std::size_t rows) {
  FeatureMatrix p(cat);
  std::vector<double> row(cat.size(), value);
  for (std::size_t i = 0; i < rows; ++i) p.AppendRow(row, 0);
  return p;
}

void ExpectBenignRowsIdentical(const FeatureMatrix& before, const FeatureMatrix& after) {
  ASSERT_EQ(before.rows(), after.rows());
  for (std::size_t i = 0; i < before.rows(); ++i) {
    if (before.label(i) != 0) continue;
    for (std::size_t j = 0; j < before.cols(); ++j) {
      EXPECT_EQ(std::memcmp(&before.Row(i)[j], &after.Row(i)[j], sizeof(double)), 0) << i << "," << j;
    }
  }
  EXPECT_EQ(before.labels(), after.labels());
}

TEST(ManipulateFeature, ConstantPool) {
  const auto x = test::ThresholdToy(50, 3, 0, 1);
  const auto out = ManipulateFeature(x, "f1", Pool(x.catalog(), 7.0, 4), 3);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    EXPECT_EQ(out.At(i, 1), x.label(i) == 1 ? 7.0 : x.At(i, 1));
    EXPECT_EQ(out.At(i, 0), x.At(i, 0));
  }
  ExpectBenignRowsIdentical(x, out);
}

TEST(ManipulateFeature, NoMaliciousRowsIsIdentity) {
  FeatureMatrix x(test::ToyCatalog(2));
  for (int i = 0; i < 5; ++i) x.AppendRow(std::vector<double>{1.0 * i, 2.0 * i}, 0);
  EXPECT_EQ(ManipulateFeature(x, "f0", Pool(x.catalog(), 3.0, 2), 1), x);
}

TEST(ManipulateFeature, SeededDrawsFromPool) {
  const auto x = test::ThresholdToy(80, 3, 0, 1);
  const auto pool = test::ThresholdToy(30, 3, 2, 9);
  const auto a = ManipulateFeature(x, "f2", pool, 5);
  EXPECT_EQ(a, ManipulateFeature(x, "f2", pool, 5));
  std::set<double> pool_values;
  for (std::size_t i = 0; i < pool.rows(); ++i) pool_values.insert(pool.At(i, 2));
  for (std::size_t i = 0; i < x.rows(); ++i) {
    if (x.label(i) == 1) {
      EXPECT_TRUE(pool_values.count(a.At(i, 2)));
    }
  }
  // Order of composition does not matter.
  const std::vector<std::string> ab = {"f0", "f2"};
  const std::vector<std::string> ba = {"f2", "f0"};
  EXPECT_EQ(ManipulateFeatures(x, ab, pool, 5), ManipulateFeatures(x, ba, pool, 5));
}

TEST(ManipulateFeature, Errors) {
  const auto x = test::ThresholdToy(20, 3, 0, 1);
  EXPECT_EQ(CodeOf([&] { ManipulateFeature(x, "nope", Pool(x.catalog(), 1, 2), 1); }), ErrorCode::kUnknownFeature);
  EXPECT_EQ(CodeOf([&] { ManipulateFeature(x, "f0", FeatureMatrix(x.catalog()), 1); }), ErrorCode::kEmptyPool);
  EXPECT_EQ(CodeOf([&] { ManipulateFeature(x, "f2", Pool(test::ToyCatalog(1), 1, 2), 1); }),
            ErrorCode::kUnknownFeature);
}

void ExpectCumulative(const AttackCurve& c) {
  ASSERT_FALSE(c.steps.empty());
  EXPECT_EQ(c.steps[0].step_id, "baseline");
  EXPECT_TRUE(c.steps[0].manipulated.empty());
  EXPECT_EQ(c.steps[0].metrics, c.baseline);
  for (std::size_t s = 1; s < c.steps.size(); ++s) {
    const auto& prev = c.steps[s - 1].manipulated;
    const auto& cur = c.steps[s].manipulated;
    ASSERT_GE(cur.size(), prev.size());
    EXPECT_TRUE(std::equal(prev.begin(), prev.end(), cur.begin()));
  }
}

// Replays each step from its manipulated set and checks the recorded metrics.
void ExpectReplayMatches(const AttackCurve& c, const TrainedModel& m, const FeatureMatrix& x, const FeatureMatrix& pool,
                         std::uint64_t seed) {
  for (const auto& step : c.steps) {
    const auto manipulated = ManipulateFeatures(x, step.manipulated, pool, seed);
    ExpectBenignRowsIdentical(x, manipulated);
    EXPECT_EQ(step.metrics, Metrics(PredictProba(m, manipulated), x.labels())) << step.step_id;
  }
}

struct AttackFixture {
  FeatureMatrix x;
  FeatureMatrix pool;
  TrainedModel model;
  ImportanceRanking ranking;
};

AttackFixture MakeAttackFixture() {
  const auto x = test::ThresholdToy(120, 4, 1, 77);
  std::vector<std::size_t> benign;
  const auto pool_src = test::ThresholdToy(200, 4, 1, 78);
  for (std::size_t i = 0; i < pool_src.rows(); ++i) {
    if (pool_src.label(i) == 0) benign.push_back(i);
  }
  auto model = ThresholdModel(1, 4);
  auto ranking = RankFeatures(model, x, RankingMethod::kPermutation, 2);
  return {x, pool_src.SelectRows(benign), model, ranking};
}

TEST(AttackPercentage, FullManipulationInRankingOrder) {
  const auto f = MakeAttackFixture();
  const std::vector<double> steps = {0.25, 0.5, 1.0};
  const auto c = AttackPercentage(f.model, f.x, f.pool, f.ranking, steps, 4);
  ASSERT_EQ(c.steps.size(), 4u);
  EXPECT_EQ(c.steps.back().manipulated, f.ranking.Names());
  EXPECT_EQ(c.steps[2].manipulated.size(), 2u);
  EXPECT_EQ(c.steps[1].step_id, "0.25");
  ExpectCumulative(c);
  ExpectReplayMatches(c, f.model, f.x, f.pool, 4);
  EXPECT_LT(c.steps.back().metrics.recall, c.baseline.recall);
}

TEST(AttackPercentage, CeilingRule) {
  const auto f = MakeAttackFixture();
  const std::vector<double> half = {0.5};
  EXPECT_EQ(AttackPercentage(f.model, f.x, f.pool, f.ranking, half, 1).steps.back().manipulated.size(), 2u);
  const std::vector<double> third = {0.3};
  EXPECT_EQ(AttackPercentage(f.model, f.x, f.pool, f.ranking, third, 1).steps.back().manipulated.size(), 2u);
  const std::vector<double> bad = {0.5, 0.4};
  EXPECT_EQ(CodeOf([&] { AttackPercentage(f.model, f.x, f.pool, f.ranking, bad, 1); }), ErrorCode::kInvalidArgument);
}

TEST(AttackTopN, StepsAndAgreementWithPercentage) {
  SynthSpec spec;
  spec.n_malicious = 60;
  spec.n_benign = 60;
  spec.seed = 4;
  const auto x = ExtractMatrix(Synthesize(spec), Catalog(), spec.reference_time)
                     .SelectColumns(Subset(Catalog(), FeatureSetSelector("memptec_d")));
  std::vector<std::size_t> benign;
  for (std::size_t i = 0; i < x.rows(); ++i) {
    if (x.label(i) == 0) benign.push_back(i);
  }
  const auto pool = x.SelectRows(benign);
  TrainConfig cfg;
  cfg.algorithm = Algorithm::kGlm;
  const auto model = Train(cfg, x, FeatureMatrix(x.catalog()));
  const auto ranking = RankFeatures(model, x, RankingMethod::kPermutation, 1, 2);

  const auto top10 = AttackTopN(model, x, pool, ranking, 10, 6);
  ASSERT_EQ(top10.steps.size(), 11u);
  EXPECT_EQ(top10.steps[10].step_id, "top10");
  ExpectCumulative(top10);
  ExpectReplayMatches(top10, model, x, pool, 6);

  const auto all = AttackTopN(model, x, pool, ranking, x.cols(), 6);
  const std::vector<double> full = {1.0};
  EXPECT_EQ(all.steps.back().metrics, AttackPercentage(model, x, pool, ranking, full, 6).steps.back().metrics);
  EXPECT_EQ(CodeOf([&] { AttackTopN(model, x, pool, ranking, x.cols() + 1, 6); }), ErrorCode::kInvalidArgument);
}

TEST(AttackTopN, ConstantModelIsFlat) {
  const auto f = MakeAttackFixture();
  const auto m = Linear({0, 0, 0, 0}, 0.3, f.x.catalog());
  const auto c = AttackTopN(m, f.x, f.pool, RankFeatures(m, f.x, RankingMethod::kPermutation, 1), 4, 2);
  for (const auto& s : c.steps) EXPECT_EQ(s.metrics, c.baseline);
}

TEST(AttackInformation, WholeGroups) {
  SynthSpec spec;
  spec.n_malicious = 40;
  spec.n_benign = 40;
  spec.seed = 9;
  const auto x = ExtractMatrix(Synthesize(spec), Catalog(), spec.reference_time);
  std::vector<std::size_t> benign;
  for (std::size_t i = 0; i < x.rows(); ++i) {
    if (x.label(i) == 0) benign.push_back(i);
  }
  const auto pool = x.SelectRows(benign);
  TrainConfig cfg;
  cfg.algorithm = Algorithm::kGlm;
  cfg.hyperparams = {{"epochs", 50}};
  const auto model = Train(cfg, x, FeatureMatrix(x.catalog()));
  const auto ranking = RankFeatures(model, x, RankingMethod::kPermutation, 1, 1);
  const auto grouping = InformationGrouping(Catalog());
  const auto c = AttackInformation(model, x, pool, grouping, ranking, 3);
  ASSERT_EQ(c.steps.size(), grouping.size() + 1);
  ExpectCumulative(c);
  ExpectReplayMatches(c, model, x, pool, 3);
  const std::set<std::string> author = {"author_exist", "author_name", "author_email"};
  for (std::size_t s = 1; s < c.steps.size(); ++s) {
    const auto& prev = c.steps[s - 1].manipulated;
    const std::set<std::string> added(c.steps[s].manipulated.begin() + static_cast<std::ptrdiff_t>(prev.size()),
                                      c.steps[s].manipulated.end());
    if (added.count("author_exist")) {
      EXPECT_EQ(added, author);
      EXPECT_EQ(c.steps[s].step_id, "authors");
    }
  }

  auto missing = grouping;
  missing.at("authors").pop_back();
  EXPECT_EQ(CodeOf([&] { AttackInformation(model, x, pool, missing, ranking, 3); }), ErrorCode::kIncompleteGrouping);
  auto twice = grouping;
  twice.at("readme").push_back("star");
  EXPECT_EQ(CodeOf([&] { AttackInformation(model, x, pool, twice, ranking, 3); }), ErrorCode::kIncompleteGrouping);

  const std::map<std::string, std::vector<std::string>> one = {{"everything", Catalog().Names()}};
  EXPECT_EQ(AttackInformation(model, x, pool, one, ranking, 3).steps.size(), 2u);
}

FeatureMatrix SynthFeatures(std::size_t n, std::uint64_t seed) {
  SynthSpec spec;
  spec.n_malicious = n;
  spec.n_benign = n;
  spec.seed = seed;
  return ExtractMatrix(Synthesize(spec), Catalog(), spec.reference_time);
}

TEST(DriftTemporal, MonotoneShiftAndBaseline) {
  const auto x = SynthFeatures(60, 10);
  TrainConfig cfg;
  cfg.algorithm = Algorithm::kGbm;
  cfg.hyperparams = {{"n_trees", 20}};
  const auto model = Train(cfg, x, FeatureMatrix(x.catalog()));
  const std::vector<std::int64_t> days = {0, 30, 90, 180, 360};
  const auto c = DriftTemporal(model, x, days);
  ASSERT_EQ(c.steps.size(), 6u);
  EXPECT_EQ(c.steps[1].step_id, "d=0");
  EXPECT_EQ(c.steps[1].metrics, c.baseline);

  const std::size_t age = Catalog().IndexOf("package_age");
  FeatureMatrix prev = x;
  for (std::size_t s = 0; s < days.size(); ++s) {
    const auto cur = DriftTemporalMatrix(x, days[s]);
    ExpectBenignRowsIdentical(x, cur);
    EXPECT_EQ(c.steps[s + 1].metrics, Metrics(PredictProba(model, cur), x.labels()));
    for (std::size_t i = 0; i < x.rows(); ++i) {
      if (x.label(i) != 1) continue;
      EXPECT_EQ(cur.At(i, age), x.At(i, age) + static_cast<double>(days[s]));
      if (s > 0) {
        EXPECT_GT(cur.At(i, age), prev.At(i, age));
      }
      for (std::size_t j = 0; j < Catalog().size(); ++j) {
        if (Catalog()[j].monotonic) {
          EXPECT_GE(cur.At(i, j), prev.At(i, j)) << Catalog()[j].name;
        }
      }
      for (const char* role : {"author", "maintainer", "contributor", "publisher"}) {
        const std::string r(role);
        const double cpn = cur.At(i, Catalog().IndexOf(r + "_CPN"));
        const double st = cur.At(i, Catalog().IndexOf(r + "_service_time"));
        EXPECT_NEAR(cur.At(i, Catalog().IndexOf(r + "_CCS")), Ccs(st, cpn), 1e-9);
        if (cpn == 0) {
          EXPECT_EQ(st, x.At(i, Catalog().IndexOf(r + "_service_time")));
        }
      }
    }
    prev = cur;
  }
  const std::vector<std::int64_t> descending = {30, 0};
  EXPECT_EQ(CodeOf([&] { DriftTemporal(model, x, descending); }), ErrorCode::kInvalidArgument);
}

TEST(DriftInteraction, AdditiveShift) {
  const auto x = SynthFeatures(40, 11);
  TrainConfig cfg;
  cfg.algorithm = Algorithm::kGlm;
  const auto model = Train(cfg, x, FeatureMatrix(x.catalog()));
  const std::vector<std::int64_t> counts = {0, 10, 50};
  const auto c = DriftInteraction(model, x, counts);
  EXPECT_EQ(c.steps[1].step_id, "c=0");
  EXPECT_EQ(c.steps[1].metrics, c.baseline);
  const auto shifted = DriftInteractionMatrix(x, 50);
  ExpectBenignRowsIdentical(x, shifted);
  const std::size_t star = Catalog().IndexOf("star");
  for (std::size_t i = 0; i < x.rows(); ++i) {
    if (x.label(i) == 1) {
      EXPECT_EQ(shifted.At(i, star), x.At(i, star) + 50.0);
    }
  }
  EXPECT_EQ(c.steps.back().metrics, Metrics(PredictProba(model, shifted), x.labels()));
}

TEST(AttackCurveCsv, Layout) {
  const auto f = MakeAttackFixture();
  const std::vector<double> steps = {0.5, 1.0};
  auto c = AttackPercentage(f.model, f.x, f.pool, f.ranking, steps, 4);
  c.model = "glm";
  c.feature_set = "toy";
  const std::string csv = AttackCurveCsv(c, "hello");
  const auto lines = SplitString(csv, '\n');
  ASSERT_GE(lines.size(), 5u);
  EXPECT_EQ(lines[0], "# hello");
  EXPECT_EQ(lines[1],
            "model,feature_set,attack_kind,step_id,manipulated_count,precision,recall,f1,accuracy,rmse,fp,fn,manipulated");
  EXPECT_EQ(lines[2].rfind("glm,toy,percentage,baseline,0,", 0), 0u);
  EXPECT_EQ(lines[4].rfind("glm,toy,percentage,1,4,", 0), 0u);
  EXPECT_TRUE(ToJson(c).contains("steps"));
}

}  // namespace
}  // namespace memptec
