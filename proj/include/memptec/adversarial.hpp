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

// Importance ranking, benign-distribution feature manipulation and monotone
// drift of difficult-to-manipulate features.

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"
#include "memptec/features.hpp"
#include "memptec/metrics.hpp"
#include "memptec/models.hpp"

namespace memptec {

enum class RankingMethod { kPermutation, kExactShapley };

std::string_view RankingMethodName(RankingMethod method);
RankingMethod ParseRankingMethod(std::string_view name);

struct ImportanceRanking {
  RankingMethod method = RankingMethod::kPermutation;
  std::uint64_t seed = 0;
  // Score descending, ties in catalog order. Scores are clamped at 0.
  std::vector<std::pair<std::string, double>> entries;

  std::vector<std::string> Names() const;
};

// Permutation: mean accuracy drop over `repeats` seeded shuffles of each
// column. Exact Shapley: full coalition enumeration, kTooManyFeaturesForExact
// above 12 features.
ImportanceRanking RankFeatures(const TrainedModel& model, const FeatureMatrix& x, RankingMethod method,
                               std::uint64_t seed, int repeats = 10, int jobs = 1);

// Shapley values of accuracy in catalog order, unclamped. A coalition's value
// is the accuracy with every feature outside it replaced by a fixed seeded
// shuffle of its column, so the values sum to accuracy(all) - accuracy(none).
std::vector<double> ExactShapley(const TrainedModel& model, const FeatureMatrix& x, std::uint64_t seed);

// Replaces `feature` in every malicious row with the value of a seeded
// uniformly drawn row of `benign_pool`. The draws depend only on (seed,
// feature), so manipulations compose in any order. Throws kUnknownFeature
// and kEmptyPool.
FeatureMatrix ManipulateFeature(const FeatureMatrix& x, std::string_view feature, const FeatureMatrix& benign_pool,
                                std::uint64_t seed);
FeatureMatrix ManipulateFeatures(const FeatureMatrix& x, std::span<const std::string> features,
                                 const FeatureMatrix& benign_pool, std::uint64_t seed);

// Shifts every duration feature of malicious rows by `days`. Service times
// move only for present stakeholders; CCS follows the shifted service time.
FeatureMatrix DriftTemporalMatrix(const FeatureMatrix& x, std::int64_t days, double ccs_base = 2.0);
// Adds `count` to each interaction feature of malicious rows.
FeatureMatrix DriftInteractionMatrix(const FeatureMatrix& x, std::int64_t count);

struct AttackStep {
  std::string step_id;
  std::vector<std::string> manipulated;  // cumulative
  MetricSet metrics;
};

// steps[0] is the unmanipulated baseline.
struct AttackCurve {
  std::string kind;
  std::string model;        // labels for reporting only
  std::string feature_set;
  MetricSet baseline;
  std::vector<AttackStep> steps;
};

// Step fractions must be ascending in (0,1]; fraction f manipulates the top
// ceil(f * F) ranked features.
AttackCurve AttackPercentage(const TrainedModel& model, const FeatureMatrix& test, const FeatureMatrix& benign_pool,
                             const ImportanceRanking& ranking, std::span<const double> fractions, std::uint64_t seed);
AttackCurve AttackTopN(const TrainedModel& model, const FeatureMatrix& test, const FeatureMatrix& benign_pool,
                       const ImportanceRanking& ranking, std::size_t n_max, std::uint64_t seed);
// Groups are manipulated whole, in descending order of summed member
// importance. Throws kIncompleteGrouping unless the groups partition the
// test catalog.
AttackCurve AttackInformation(const TrainedModel& model, const FeatureMatrix& test, const FeatureMatrix& benign_pool,
                              const std::map<std::string, std::vector<std::string>>& grouping,
                              const ImportanceRanking& ranking, std::uint64_t seed);
AttackCurve DriftTemporal(const TrainedModel& model, const FeatureMatrix& test, std::span<const std::int64_t> days);
AttackCurve DriftInteraction(const TrainedModel& model, const FeatureMatrix& test,
                             std::span<const std::int64_t> counts);

// model,feature_set,attack_kind,step_id,manipulated_count,precision,recall,
// f1,accuracy,rmse,fp,fn,manipulated
std::string AttackCurveCsv(const AttackCurve& curve, std::string_view comment = {});
nlohmann::json ToJson(const AttackCurve& curve);
nlohmann::json ToJson(const ImportanceRanking& ranking);

}  // namespace memptec
