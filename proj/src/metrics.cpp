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

#include "memptec/metrics.hpp"

#include <cmath>

#include "memptec/error.hpp"

namespace memptec {

ConfusionCounts Confusion(std::span<const int> predicted, std::span<const int> truth) {
  if (predicted.size() != truth.size() || truth.empty()) {
    throw Error(ErrorCode::kLengthMismatch, "predicted has " + std::to_string(predicted.size()) +
                                                " entries, truth has " + std::to_string(truth.size()));
  }
  ConfusionCounts c;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const bool p = predicted[i] == 1;
    const bool t = truth[i] == 1;
    if (p && t) ++c.tp;
    else if (p) ++c.fp;
    else if (t) ++c.fn;
    else ++c.tn;
  }
  return c;
}

MetricSet Metrics(std::span<const double> proba, std::span<const int> truth, double threshold) {
  if (proba.size() != truth.size() || truth.empty()) {
    throw Error(ErrorCode::kLengthMismatch, "proba has " + std::to_string(proba.size()) +
                                                " entries, truth has " + std::to_string(truth.size()));
  }
  std::vector<int> predicted(proba.size());
  double sq = 0.0;
  for (std::size_t i = 0; i < proba.size(); ++i) {
    predicted[i] = proba[i] >= threshold ? 1 : 0;
    const double d = proba[i] - truth[i];
    sq += d * d;
  }
  const ConfusionCounts c = Confusion(predicted, truth);
  MetricSet m;
  m.precision = c.tp + c.fp == 0 ? 0.0 : static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
  m.recall = c.tp + c.fn == 0 ? 0.0 : static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
  m.f1 = m.precision + m.recall == 0.0 ? 0.0 : 2.0 * m.precision * m.recall / (m.precision + m.recall);
  m.accuracy = static_cast<double>(c.tp + c.tn) / static_cast<double>(c.total());
  m.mse = sq / static_cast<double>(proba.size());
  m.rmse = std::sqrt(m.mse);
  m.fp = c.fp;
  m.fn = c.fn;
  return m;
}

const std::vector<std::string>& MetricNames() {
  static const std::vector<std::string> names = {"precision", "recall", "f1", "accuracy",
                                                 "mse",       "rmse",   "fp", "fn"};
  return names;
}

double MetricValue(const MetricSet& m, const std::string& name) {
  if (name == "precision") return m.precision;
  if (name == "recall") return m.recall;
  if (name == "f1") return m.f1;
  if (name == "accuracy") return m.accuracy;
  if (name == "mse") return m.mse;
  if (name == "rmse") return m.rmse;
  if (name == "fp") return static_cast<double>(m.fp);
  if (name == "fn") return static_cast<double>(m.fn);
  throw Error(ErrorCode::kInvalidArgument, "unknown metric '" + name + "'");
}

AggregateResult Aggregate(std::span<const MetricSet> runs) {
  if (runs.empty()) throw Error(ErrorCode::kInvalidArgument, "no runs to aggregate");
  AggregateResult out;
  const double k = static_cast<double>(runs.size());
  for (const auto& name : MetricNames()) {
    double sum = 0.0;
    for (const auto& r : runs) sum += MetricValue(r, name);
    const double mean = sum / k;
    double se = 0.0;
    if (runs.size() > 1) {
      double ss = 0.0;
      for (const auto& r : runs) {
        const double d = MetricValue(r, name) - mean;
        ss += d * d;
      }
      se = std::sqrt(ss / (k - 1.0)) / std::sqrt(k);
    }
    out.metrics[name] = {mean, se};
  }
  if (runs.size() == 1) out.warnings.push_back("single run: standard error reported as 0");
  return out;
}

nlohmann::json ToJson(const MetricSet& m) {
  return {{"precision", m.precision}, {"recall", m.recall}, {"f1", m.f1}, {"accuracy", m.accuracy},
          {"mse", m.mse},             {"rmse", m.rmse},     {"fp", m.fp}, {"fn", m.fn}};
}

MetricSet MetricSetFromJson(const nlohmann::json& j) {
  MetricSet m;
  m.precision = j.at("precision").get<double>();
  m.recall = j.at("recall").get<double>();
  m.f1 = j.at("f1").get<double>();
  m.accuracy = j.at("accuracy").get<double>();
  m.mse = j.at("mse").get<double>();
  m.rmse = j.at("rmse").get<double>();
  m.fp = j.at("fp").get<std::int64_t>();
  m.fn = j.at("fn").get<std::int64_t>();
  return m;
}

}  // namespace memptec
