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

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

namespace memptec {

// Positive class is malicious (label 1).
struct ConfusionCounts {
  std::int64_t tp = 0;
  std::int64_t fp = 0;
  std::int64_t fn = 0;
  std::int64_t tn = 0;

  std::int64_t total() const { return tp + fp + fn + tn; }
  bool operator==(const ConfusionCounts&) const = default;
};

struct MetricSet {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double accuracy = 0.0;
  double mse = 0.0;  // on probabilities, not hard labels
  double rmse = 0.0;
  std::int64_t fp = 0;
  std::int64_t fn = 0;

  bool operator==(const MetricSet&) const = default;
};

// Throws kLengthMismatch on unequal or empty inputs.
ConfusionCounts Confusion(std::span<const int> predicted, std::span<const int> truth);

// Label = 1 iff proba >= threshold. Zero denominators give 0, never NaN.
MetricSet Metrics(std::span<const double> proba, std::span<const int> truth, double threshold = 0.5);

struct MeanSe {
  double mean = 0.0;
  double standard_error = 0.0;
};

struct AggregateResult {
  std::map<std::string, MeanSe> metrics;
  std::vector<std::string> warnings;
};

// standard_error = sample stddev / sqrt(k). A single run gets SE 0 and a warning.
AggregateResult Aggregate(std::span<const MetricSet> runs);

// Metric names in reporting order.
const std::vector<std::string>& MetricNames();
double MetricValue(const MetricSet& m, const std::string& name);

nlohmann::json ToJson(const MetricSet& m);
MetricSet MetricSetFromJson(const nlohmann::json& j);

}  // namespace memptec
