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


#include "memptec/dataset.hpp"

#include <gtest/gtest.h>

#include <set>

#include "test_support.hpp"

namespace memptec {
namespace {

using test::CodeOf;

std::vector<PackageMetadata> Packages(const std::string& prefix, std::size_t n) {
  std::vector<PackageMetadata> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i].package_name = prefix + std::to_string(i);
  return out;
}

std::vector<int> Labels(std::size_t n, std::size_t positives) {
  std::vector<int> y(n, 0);
  for (std::size_t i = 0; i < positives; ++i) y[i * n / positives] = 1;
  return y;
}

std::size_t Positives(const std::vector<std::size_t>& idx, const std::vector<int>& y) {
  std::size_t n = 0;
  for (auto i : idx) n += static_cast<std::size_t>(y[i]);
  return n;
}

void ExpectPartition(const SplitIndices& s, std::size_t n) {
  std::vector<int> seen(n, 0);
  for (const auto* part : {&s.train, &s.valid, &s.test}) {
    EXPECT_TRUE(std::is_sorted(part->begin(), part->end()));
    for (auto i : *part) {
      ASSERT_LT(i, n);
      ++seen[i];
    }
  }
  for (int c : seen) EXPECT_EQ(c, 1);
}

TEST(Assemble, Imbalanced) {
  const auto ds = Assemble(Packages("m", 3232), Packages("b", 32320), Ratio::kImbalanced1To10, 1);
  std::size_t mal = 0;
  for (const auto& r : ds) mal += static_cast<std::size_t>(r.label);
  EXPECT_EQ(ds.size(), 3232u + 32320u);
  EXPECT_EQ(mal, 3232u);
}

TEST(Assemble, BalancedAndInsufficient) {
  EXPECT_EQ(Assemble(Packages("m", 5), Packages("b", 5), Ratio::kBalanced1To1, 1).size(), 10u);
  EXPECT_EQ(CodeOf([] { Assemble(Packages("m", 5), Packages("b", 3), Ratio::kBalanced1To1, 1); }),
            ErrorCode::kInsufficientBenign);
  EXPECT_EQ(CodeOf([] { Assemble(Packages("m", 5), Packages("b", 49), Ratio::kImbalanced1To10, 1); }),
            ErrorCode::kInsufficientBenign);
}

TEST(AssembleProperty, NoDuplicatesSeededAndShuffled) {
  const auto a = Assemble(Packages("m", 20), Packages("b", 300), Ratio::kImbalanced1To10, 4);
  std::set<std::string> names;
  for (const auto& r : a) {
    EXPECT_TRUE(names.insert(r.metadata.package_name).second);
    EXPECT_EQ(r.label, r.metadata.package_name[0] == 'm' ? 1 : 0);
  }
  EXPECT_EQ(a, Assemble(Packages("m", 20), Packages("b", 300), Ratio::kImbalanced1To10, 4));
  EXPECT_NE(a, Assemble(Packages("m", 20), Packages("b", 300), Ratio::kImbalanced1To10, 5));
  EXPECT_FALSE(std::is_sorted(a.begin(), a.end(), [](const auto& x, const auto& y) { return x.label > y.label; }));
}

TEST(Ratio, Parse) {
  EXPECT_EQ(ParseRatio("balanced"), Ratio::kBalanced1To1);
  EXPECT_EQ(ParseRatio("1:10"), Ratio::kImbalanced1To10);
  EXPECT_EQ(ParseRatio("imbalanced_1_10"), Ratio::kImbalanced1To10);
  EXPECT_EQ(CodeOf([] { ParseRatio("1:3"); }), ErrorCode::kInvalidArgument);
}

TEST(Split, HundredRows) {
  const auto y = Labels(100, 30);
  const auto s = Split(y, {.seed = 3});
  EXPECT_EQ(s.train.size(), 70u);
  EXPECT_EQ(s.valid.size(), 10u);
  EXPECT_EQ(s.test.size(), 20u);
  ExpectPartition(s, 100);
  EXPECT_EQ(s, Split(y, {.seed = 3}));
}

TEST(Split, StratifiedBalanced) {
  const auto y = Labels(200, 100);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto s = Split(y, {.seed = seed});
    EXPECT_NEAR(static_cast<double>(Positives(s.train, y)), 70.0, 1.0);
    EXPECT_NEAR(static_cast<double>(Positives(s.valid, y)), 10.0, 1.0);
    EXPECT_NEAR(static_cast<double>(Positives(s.test, y)), 20.0, 1.0);
  }
}

TEST(SplitProperty, PartitionAndStratificationOnRandomSizes) {
  Rng rng(17);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 10 + rng.Index(500);
    std::vector<int> y(n);
    const double p = rng.Uniform(0.05, 0.95);
    for (auto& v : y) v = rng.Bernoulli(p) ? 1 : 0;
    const auto s = Split(y, {.seed = rng.NextU64()});
    ExpectPartition(s, n);
    EXPECT_EQ(s.train.size(), static_cast<std::size_t>(std::llround(0.7 * static_cast<double>(n))));
    EXPECT_EQ(s.valid.size(), static_cast<std::size_t>(std::llround(0.1 * static_cast<double>(n))));
    const double pos = static_cast<double>(std::count(y.begin(), y.end(), 1));
    EXPECT_NEAR(static_cast<double>(Positives(s.train, y)), 0.7 * pos, 1.0);
    EXPECT_NEAR(static_cast<double>(Positives(s.valid, y)), 0.1 * pos, 1.0);
    EXPECT_NEAR(static_cast<double>(Positives(s.test, y)), 0.2 * pos, 1.0);
  }
}

TEST(Split, UnstratifiedStillPartitions) {
  const auto y = Labels(57, 20);
  const auto s = Split(y, {.stratified = false, .seed = 1});
  ExpectPartition(s, 57);
  EXPECT_EQ(s.train.size(), 40u);
}

TEST(Split, Errors) {
  const auto y = Labels(9, 4);
  EXPECT_EQ(CodeOf([&] { Split(y, {}); }), ErrorCode::kTooSmall);
  const auto z = Labels(20, 5);
  EXPECT_EQ(CodeOf([&] { Split(z, {.train_frac = 0.5, .valid_frac = 0.1, .test_frac = 0.2}); }),
            ErrorCode::kInvalidArgument);
}

TEST(RepeatedSplits, FiveOnThousandRows) {
  const auto y = Labels(1000, 500);
  const auto folds = RepeatedSplits(y, 5, 100);
  ASSERT_EQ(folds.size(), 5u);
  std::set<std::vector<std::size_t>> tests;
  for (std::size_t k = 0; k < folds.size(); ++k) {
    EXPECT_EQ(folds[k].train.size(), 700u);
    EXPECT_EQ(folds[k].valid.size(), 100u);
    EXPECT_EQ(folds[k].test.size(), 200u);
    EXPECT_EQ(folds[k].seed, 100u + k);
    EXPECT_EQ(folds[k], Split(y, {.seed = 100 + k}));
    tests.insert(folds[k].test);
  }
  EXPECT_EQ(tests.size(), 5u);
  EXPECT_EQ(CodeOf([&] { RepeatedSplits(y, 1, 0); }), ErrorCode::kInvalidArgument);
}

TEST(KFoldSplits, TestFoldsPartitionData) {
  const auto y = Labels(103, 40);
  const auto folds = KFoldSplits(y, 5, 9);
  ASSERT_EQ(folds.size(), 5u);
  std::vector<int> tested(103, 0);
  for (const auto& f : folds) {
    ExpectPartition(f, 103);
    for (auto i : f.test) ++tested[i];
    EXPECT_NEAR(static_cast<double>(f.test.size()), 103.0 / 5.0, 1.0);
  }
  for (int c : tested) EXPECT_EQ(c, 1);
}

TEST(SplitIndices, JsonRoundTrip) {
  const auto s = Split(Labels(50, 20), {.seed = 77});
  const auto j = ToJson(s);
  EXPECT_TRUE(j.contains("train_idx"));
  EXPECT_TRUE(j.contains("valid_idx"));
  EXPECT_TRUE(j.contains("test_idx"));
  EXPECT_EQ(j.at("seed"), 77);
  EXPECT_EQ(SplitIndicesFromJson(j), s);
}

}  // namespace
}  // namespace memptec
