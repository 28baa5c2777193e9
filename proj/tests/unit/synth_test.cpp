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


#include "memptec/synth.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "memptec/features.hpp"
#include "test_support.hpp"

namespace memptec {
namespace {

using test::CodeOf;

SynthSpec Spec(std::size_t n_mal, std::size_t n_ben, std::uint64_t seed) {
  SynthSpec s;
  s.n_malicious = n_mal;
  s.n_benign = n_ben;
  s.seed = seed;
  return s;
}

double ColumnMean(const FeatureMatrix& m, std::string_view name, int label) {
  const std::size_t j = m.catalog().IndexOf(name);
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    if (m.label(i) != label) continue;
    sum += m.At(i, j);
    ++n;
  }
  return sum / static_cast<double>(n);
}

double ColumnMedian(const FeatureMatrix& m, std::string_view name, int label) {
  const std::size_t j = m.catalog().IndexOf(name);
  std::vector<double> v;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    if (m.label(i) == label) v.push_back(m.At(i, j));
  }
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2), v.end());
  return v[v.size() / 2];
}

FeatureMatrix Extracted(const SynthSpec& spec) {
  const auto corpus = Synthesize(spec);
  return ExtractMatrix(corpus, Catalog(), spec.reference_time);
}

TEST(Synthesize, Counts) {
  const auto c = Synthesize(Spec(50, 50, 1));
  ASSERT_EQ(c.size(), 100u);
  std::size_t mal = 0;
  std::set<std::string> names;
  for (const auto& r : c) {
    mal += static_cast<std::size_t>(r.label);
    names.insert(r.metadata.package_name);
  }
  EXPECT_EQ(mal, 50u);
  EXPECT_EQ(names.size(), 100u);
}

TEST(Synthesize, AuthorExistSkewsBenign) {
  const auto m = Extracted(Spec(500, 500, 2));
  EXPECT_GT(ColumnMean(m, "author_exist", 0), ColumnMean(m, "author_exist", 1));
}

TEST(Synthesize, DeterministicPerSeed) {
  EXPECT_EQ(Synthesize(Spec(30, 30, 3)), Synthesize(Spec(30, 30, 3)));
  EXPECT_NE(Synthesize(Spec(30, 30, 3)), Synthesize(Spec(30, 30, 4)));
}

TEST(SynthProperty, RecordsValidateAndExtractWithoutSkew) {
  const auto spec = Spec(150, 150, 5);
  const auto corpus = Synthesize(spec);
  for (const auto& r : corpus) {
    EXPECT_TRUE(ValidatePmi(r.metadata).empty()) << r.metadata.package_name;
    EXPECT_LE(r.metadata.created_time, spec.reference_time);
  }
  EXPECT_NO_THROW(ExtractMatrix(corpus, Catalog(), spec.reference_time));
}

TEST(SynthProperty, DefaultProfileDirections) {
  const auto m = Extracted(Spec(800, 800, 6));
  for (const char* name : {"readme_length", "package_age", "versions_num_count", "homepage_exist", "star",
                           "author_service_time", "maintainer_CCS"}) {
    EXPECT_GT(ColumnMean(m, name, 0), ColumnMean(m, name, 1)) << name;
  }
}

// Features sampled from a profile land near the profile's medians.
TEST(SynthProperty, ConstantProfileIsReproducedExactly) {
  auto spec = Spec(200, 200, 7);
  spec.profile.features["readme_exist"] = {Distribution::Constant(1), Distribution::Constant(1)};
  spec.profile.features["readme_length"] = {Distribution::Constant(1234), Distribution::Constant(17)};
  spec.profile.features["star"] = {Distribution::LogNormal(50, 0.0), Distribution::LogNormal(3, 0.0)};
  spec.profile.features["github_exist"] = {Distribution::Constant(1), Distribution::Constant(1)};
  const auto m = Extracted(spec);
  EXPECT_EQ(ColumnMedian(m, "readme_length", 0), 1234.0);
  EXPECT_EQ(ColumnMedian(m, "readme_length", 1), 17.0);
  EXPECT_EQ(ColumnMean(m, "readme_length", 1), 17.0);
  EXPECT_EQ(ColumnMean(m, "star", 0), 50.0);
  EXPECT_EQ(ColumnMean(m, "star", 1), 3.0);
}

TEST(SynthProperty, ServiceTimeIsAgePlusTenure) {
  auto spec = Spec(100, 100, 8);
  spec.profile.features["author_exist"] = {Distribution::Constant(1), Distribution::Constant(1)};
  spec.profile.features["author_service_time"] = {Distribution::Constant(40), Distribution::Constant(0)};
  const auto m = Extracted(spec);
  const std::size_t age = Catalog().IndexOf("package_age");
  const std::size_t st = Catalog().IndexOf("author_service_time");
  for (std::size_t i = 0; i < m.rows(); ++i) {
    EXPECT_EQ(m.At(i, st), m.At(i, age) + (m.label(i) == 0 ? 40.0 : 0.0)) << i;
  }
}

TEST(ValidateSynthSpec, Errors) {
  EXPECT_NO_THROW(ValidateSynthSpec(Spec(1, 1, 0)));
  EXPECT_EQ(CodeOf([] { ValidateSynthSpec(Spec(0, 5, 0)); }), ErrorCode::kBadProfile);

  auto missing = Spec(5, 5, 0);
  missing.profile.features.erase("star");
  EXPECT_EQ(CodeOf([&] { ValidateSynthSpec(missing); }), ErrorCode::kBadProfile);

  auto unknown = Spec(5, 5, 0);
  unknown.profile.features["nope"] = {Distribution::Constant(0), Distribution::Constant(0)};
  EXPECT_EQ(CodeOf([&] { ValidateSynthSpec(unknown); }), ErrorCode::kBadProfile);

  auto non_binary = Spec(5, 5, 0);
  non_binary.profile.features["author_exist"].benign = Distribution::LogNormal(3, 1);
  EXPECT_EQ(CodeOf([&] { ValidateSynthSpec(non_binary); }), ErrorCode::kBadProfile);

  auto derived = Spec(5, 5, 0);
  derived.profile.features["star"].malicious = Distribution::Derived();
  EXPECT_EQ(CodeOf([&] { ValidateSynthSpec(derived); }), ErrorCode::kBadProfile);

  auto sampled_ccs = Spec(5, 5, 0);
  sampled_ccs.profile.features["author_CCS"].benign = Distribution::Constant(2);
  EXPECT_EQ(CodeOf([&] { ValidateSynthSpec(sampled_ccs); }), ErrorCode::kBadProfile);

  auto bad_p = Spec(5, 5, 0);
  bad_p.profile.features["author_exist"].benign = Distribution::Bernoulli(1.5);
  EXPECT_EQ(CodeOf([&] { ValidateSynthSpec(bad_p); }), ErrorCode::kBadProfile);

  auto bad_rho = Spec(5, 5, 0);
  bad_rho.profile.popularity_rho_benign = 1.5;
  EXPECT_EQ(CodeOf([&] { Synthesize(bad_rho); }), ErrorCode::kBadProfile);
}

TEST(Profile, JsonRoundTripAndOverrides) {
  const auto p = DefaultProfile();
  EXPECT_EQ(ProfileFromJson(ProfileToJson(p)), p);
  const auto q = ProfileFromJson(nlohmann::json::parse(
      R"({"features":{"star":{"malicious":{"kind":"constant","value":0}}},"popularity_rho_malicious":0.1})"));
  EXPECT_EQ(q.features.at("star").malicious, Distribution::Constant(0));
  EXPECT_EQ(q.features.at("star").benign, p.features.at("star").benign);
  EXPECT_EQ(q.popularity_rho_malicious, 0.1);
  EXPECT_EQ(CodeOf([] { ProfileFromJson(nlohmann::json::parse(R"({"features":{"nope":{}}})")); }),
            ErrorCode::kBadProfile);
  EXPECT_EQ(CodeOf([] { ProfileFromJson(nlohmann::json::parse(R"({"features":{"star":{"benign":{"kind":"zipf"}}}})")); }),
            ErrorCode::kBadProfile);
  EXPECT_EQ(CodeOf([] { ProfileFromJson(nlohmann::json::array()); }), ErrorCode::kBadProfile);
}

TEST(Distribution, Sampling) {
  Rng rng(1);
  EXPECT_EQ(Distribution::Constant(4).Sample(rng), 4.0);
  double ones = 0.0;
  std::vector<double> ln;
  std::size_t zeros = 0;
  for (int i = 0; i < 20000; ++i) {
    ones += Distribution::Bernoulli(0.3).Sample(rng);
    const double v = Distribution::LogNormal(100, 1.0, 0.25).Sample(rng);
    if (v == 0.0) {
      ++zeros;
    } else {
      ln.push_back(v);
    }
    const double u = Distribution::Uniform(2, 5).Sample(rng);
    EXPECT_GE(u, 2.0);
    EXPECT_LE(u, 5.0);
  }
  EXPECT_NEAR(ones / 20000.0, 0.3, 0.02);
  EXPECT_NEAR(static_cast<double>(zeros) / 20000.0, 0.25, 0.02);
  std::nth_element(ln.begin(), ln.begin() + static_cast<std::ptrdiff_t>(ln.size() / 2), ln.end());
  EXPECT_NEAR(ln[ln.size() / 2], 100.0, 8.0);
}

}  // namespace
}  // namespace memptec
