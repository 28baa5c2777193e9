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

// Corpus assembly at fixed class ratios and seeded train/valid/test splits.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "memptec/pmi.hpp"

namespace memptec {

enum class Ratio { kBalanced1To1, kImbalanced1To10 };

Ratio ParseRatio(std::string_view text);  // "balanced" | "imbalanced"
std::string_view RatioName(Ratio ratio);

// Keeps every malicious package, samples benign ones without replacement to
// the exact ratio, and shuffles the result. Throws kInsufficientBenign.
std::vector<LabeledPMI> Assemble(const std::vector<PackageMetadata>& malicious,
                                 const std::vector<PackageMetadata>& benign, Ratio ratio, std::uint64_t seed);

struct SplitSpec {
  double train_frac = 0.70;
  double valid_frac = 0.10;
  double test_frac = 0.20;
  bool stratified = true;
  std::uint64_t seed = 0;
};

// Row indices of one partition, each list ascending.
struct SplitIndices {
  std::uint64_t seed = 0;
  std::vector<std::size_t> train;
  std::vector<std::size_t> valid;
  std::vector<std::size_t> test;

  bool operator==(const SplitIndices&) const = default;
};

// Totals are round(n * frac) for train and valid, remainder to test. With
// stratification every per-class count stays within one row of
// class_size * frac. Throws kTooSmall for
// fewer than 10 rows.
SplitIndices Split(std::span<const int> labels, const SplitSpec& spec);

// k seeded holdout splits, fold i using seed master_seed + i.
std::vector<SplitIndices> RepeatedSplits(std::span<const int> labels, int k, std::uint64_t master_seed,
                                         SplitSpec base = {});

// Classical k-fold: fold i tests on the i-th stratified partition; the
// validation rows are carved from the remainder at valid/(train+valid).
std::vector<SplitIndices> KFoldSplits(std::span<const int> labels, int k, std::uint64_t seed,
                                      SplitSpec base = {});

nlohmann::json ToJson(const SplitIndices& s);
SplitIndices SplitIndicesFromJson(const nlohmann::json& j);

}  // namespace memptec
