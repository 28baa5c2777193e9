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


#include "memptec/features.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "memptec/synth.hpp"
#include "test_support.hpp"

namespace memptec {
namespace {

using test::CodeOf;
using test::FixtureText;

Timestamp Ts(const char* s) { return *ParseTimestamp(s); }

double Value(const FeatureVector& v, std::string_view name) { return v.values[Catalog().IndexOf(name)]; }

TEST(Extract, AxiosGoldenValues) {
  const auto axios = ParsePmi(FixtureText("axios.json"));
  const auto v = Extract(axios, Catalog(), Ts("2023-05-20T00:00:00Z"));
  ASSERT_EQ(v.values.size(), 56u);
  EXPECT_EQ(v.package_name, "axios");
  EXPECT_EQ(Value(v, "keywords_num_count"), 5.0);
  EXPECT_EQ(Value(v, "fork_number"), 10900.0);
  EXPECT_EQ(Value(v, "star"), 10300.0);
  EXPECT_EQ(Value(v, "subscriber_count"), 1200.0);
  EXPECT_EQ(Value(v, "issues"), 488.0);
  EXPECT_EQ(Value(v, "description_length"), 53.0);
  EXPECT_EQ(Value(v, "package_age"), 3186.0);
  EXPECT_EQ(Value(v, "name_length"), 5.0);
  EXPECT_EQ(Value(v, "author_exist"), 1.0);
  EXPECT_EQ(Value(v, "author_name"), 1.0);
  EXPECT_EQ(Value(v, "author_email"), 0.0);
  EXPECT_EQ(Value(v, "versions_num_count"), 2.0);
  EXPECT_EQ(Value(v, "package_modified_duration"), 3186.0);
  EXPECT_EQ(Value(v, "package_published_duration"), 0.0);
  EXPECT_EQ(Value(v, "github_exist"), 1.0);
  EXPECT_EQ(Value(v, "github_length"), 38.0);
}

TEST(Extract, NameOnlyDocument) {
  auto p = ParsePmi(R"({"name":"lonely","time":{"created":"2020-01-01T00:00:00Z"}})");
  const auto v = Extract(p, Catalog(), Ts("2020-03-01T00:00:00Z"));
  for (std::size_t j = 0; j < Catalog().size(); ++j) {
    const auto& f = Catalog()[j];
    if (f.name == "name_exist") {
      EXPECT_EQ(v.values[j], 1.0);
    } else if (f.name == "name_length") {
      EXPECT_EQ(v.values[j], 6.0);
    } else if (f.name == "package_age") {
      EXPECT_EQ(v.values[j], 60.0);
    } else {
      EXPECT_EQ(v.values[j], 0.0) << f.name;
    }
  }
}

TEST(Extract, StakeholderFeaturesUseHistory) {
  auto p = ParsePmi(R"({"name":"x","author":{"name":"Ann"},"time":{"created":"2020-01-01T00:00:00Z"}})");
  p.stakeholder_history[PersonId(p.authors[0])] = {Role::kAuthor, Ts("2019-01-01T00:00:00Z"), 7};
  const auto v = Extract(p, Catalog(), Ts("2020-01-01T12:00:00Z"));
  EXPECT_EQ(Value(v, "author_CPN"), 7.0);
  EXPECT_EQ(Value(v, "author_service_time"), 365.0);
  EXPECT_NEAR(Value(v, "author_CCS"), std::log2(366.0) * 3.0, 1e-12);
  EXPECT_EQ(Value(v, "maintainer_CPN"), 0.0);
  EXPECT_EQ(Value(v, "maintainer_CCS"), 0.0);
}

TEST(Extract, ClockSkew) {
  const auto axios = ParsePmi(FixtureText("axios.json"));
  EXPECT_EQ(CodeOf([&] { Extract(axios, Catalog(), Ts("2010-01-01T00:00:00Z")); }), ErrorCode::kClockSkew);
}

TEST(Extract, SpecialCharFeatureOnlyInExtendedCatalog) {
  auto p = ParsePmi(R"({"name":"@evil/lodahs_","time":{"created":"2020-01-01T00:00:00Z"}})");
  const auto v = Extract(p, ExtendedCatalog(), Ts("2020-01-02T00:00:00Z"));
  EXPECT_EQ(v.values.size(), 57u);
  EXPECT_GT(v.values[ExtendedCatalog().IndexOf("name_special_char")], 0.0);
}

TEST(Ccs, Examples) {
  for (double n : {0.0, 1.0, 5.0, 1000.0}) EXPECT_EQ(Ccs(0, n, 2), 0.0);
  EXPECT_EQ(Ccs(3, 3, 2), 4.0);
  EXPECT_NEAR(Ccs(365, 7, 2), 25.548, 1e-3);
  EXPECT_NEAR(Ccs(365, 7, 2), std::log2(366.0) * 3.0, 1e-12);
  EXPECT_NEAR(Ccs(99, 9, 10), 2.0, 1e-12);
}

TEST(Ccs, Errors) {
  EXPECT_EQ(CodeOf([] { Ccs(1, 1, 1.0); }), ErrorCode::kBadBase);
  EXPECT_EQ(CodeOf([] { Ccs(1, 1, 0.5); }), ErrorCode::kBadBase);
  EXPECT_EQ(CodeOf([] { Ccs(-1, 1, 2); }), ErrorCode::kInvalidArgument);
}

TEST(CcsProperty, MonotoneAndSymmetric) {
  Rng rng(3);
  for (int i = 0; i < 200; ++i) {
    const double s = rng.Uniform(0, 5000);
    const double c = std::floor(rng.Uniform(0, 200));
    const double ds = rng.Uniform(0, 100);
    EXPECT_LE(Ccs(s, c), Ccs(s + ds, c));
    EXPECT_LE(Ccs(s, c), Ccs(s, c + 1));
    EXPECT_DOUBLE_EQ(Ccs(c, s), Ccs(s, c));
  }
}

std::vector<LabeledPMI> SmallCorpus(std::size_t n_each, std::uint64_t seed) {
  SynthSpec spec;
  spec.n_malicious = n_each;
  spec.n_benign = n_each;
  spec.seed = seed;
  return Synthesize(spec);
}

// Legitimate forward updates never decrease a monotonic feature.
TEST(ExtractProperty, MonotoneUnderForwardUpdates) {
  const auto corpus = SmallCorpus(40, 5);
  const Timestamp ref = DefaultReferenceTime(corpus);
  Rng rng(9);
  for (const auto& r : corpus) {
    PackageMetadata p = r.metadata;
    Timestamp t = ref;
    auto before = Extract(p, Catalog(), t);
    for (int step = 0; step < 6; ++step) {
      switch (rng.Index(3)) {
        case 0:
          t = AddDays(t, static_cast<std::int64_t>(rng.Index(400)));
          break;
        case 1: {
          const Timestamp when = AddDays(t, -static_cast<std::int64_t>(rng.Index(2)));
          p.published_times["99." + std::to_string(step) + ".0"] = std::max(when, p.created_time);
          p.modified_time = std::max(p.modified_time.value_or(p.created_time), std::max(when, p.created_time));
          break;
        }
        default:
          for (auto& [id, rec] : p.stakeholder_history) rec.contributed_package_count += 1;
      }
      const auto after = Extract(p, Catalog(), t);
      for (std::size_t j = 0; j < Catalog().size(); ++j) {
        if (Catalog()[j].monotonic) {
          EXPECT_LE(before.values[j], after.values[j]) << p.package_name << " " << Catalog()[j].name;
        }
      }
      before = after;
    }
  }
}

TEST(ExtractProperty, EtmIndependentOfInteractionsAndTimes) {
  for (const auto& r : SmallCorpus(20, 6)) {
    PackageMetadata p = r.metadata;
    const Timestamp ref = AddDays(p.modified_time.value_or(p.created_time), 30);
    const auto a = Extract(p, Catalog(), ref);
    p.interactions = {1, 2, 3, 4, 5};
    p.created_time = AddDays(p.created_time, -100);
    for (auto& [v, when] : p.published_times) when = AddDays(when, -50);
    const auto b = Extract(p, Catalog(), AddDays(ref, 10));
    for (std::size_t j = 0; j < 36; ++j) EXPECT_EQ(a.values[j], b.values[j]) << Catalog()[j].name;
  }
}

TEST(ExtractProperty, DtmIndependentOfDescriptiveText) {
  for (const auto& r : SmallCorpus(20, 7)) {
    PackageMetadata p = r.metadata;
    const Timestamp ref = AddDays(p.modified_time.value_or(p.created_time), 30);
    const auto a = Extract(p, Catalog(), ref);
    p.description = "rewritten description";
    p.readme = std::string(1000, 'r');
    p.keywords = {"a", "b"};
    p.licenses = "Apache-2.0";
    p.homepage_link = "https://example.org/x";
    const auto b = Extract(p, Catalog(), ref);
    for (std::size_t j = 36; j < 56; ++j) EXPECT_EQ(a.values[j], b.values[j]) << Catalog()[j].name;
  }
}

TEST(ExtractProperty, RangeContract) {
  const auto corpus = SmallCorpus(50, 8);
  const auto m = ExtractMatrix(corpus, Catalog(), DefaultReferenceTime(corpus));
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      const double v = m.At(i, j);
      EXPECT_TRUE(std::isfinite(v));
      EXPECT_GE(v, 0.0);
      if (Catalog()[j].value_kind == ValueKind::kBinary) {
        EXPECT_TRUE(v == 0.0 || v == 1.0);
      }
    }
  }
}

TEST(ExtractMatrix, ShapeLabelsAndDeterminism) {
  const auto corpus = LoadFixtureCorpus(test::Fixture("corpus10.jsonl"));
  const Timestamp ref = DefaultReferenceTime(corpus);
  const auto a = ExtractMatrix(corpus, Catalog(), ref);
  EXPECT_EQ(a.rows(), 10u);
  EXPECT_EQ(a.cols(), 56u);
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    EXPECT_EQ(a.label(i), corpus[i].label);
    EXPECT_EQ(a.package_names()[i], corpus[i].metadata.package_name);
  }
  EXPECT_EQ(a, ExtractMatrix(corpus, Catalog(), ref));
  EXPECT_EQ(a, ExtractMatrix(corpus, Catalog(), ref, 4));
}

TEST(ExtractMatrix, ClockSkewNamesPackage) {
  auto corpus = LoadFixtureCorpus(test::Fixture("corpus10.jsonl"));
  const Timestamp ref = DefaultReferenceTime(corpus);
  corpus[3].metadata.created_time = AddDays(ref, 5);
  try {
    ExtractMatrix(corpus, Catalog(), ref);
    FAIL() << "expected ClockSkew";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kClockSkew);
    EXPECT_NE(std::string(e.what()).find(corpus[3].metadata.package_name), std::string::npos) << e.what();
  }
}

TEST(ExtractMatrix, DefaultReferenceTimeIsNewestModified) {
  const auto corpus = LoadFixtureCorpus(test::Fixture("corpus10.jsonl"));
  Timestamp newest{};
  for (const auto& r : corpus) newest = std::max(newest, r.metadata.modified_time.value_or(r.metadata.created_time));
  EXPECT_EQ(DefaultReferenceTime(corpus), newest);
}

TEST(MatrixCsv, RoundTrip) {
  const auto corpus = SmallCorpus(15, 12);
  const auto m = ExtractMatrix(corpus, Catalog(), DefaultReferenceTime(corpus));
  const std::string csv = MatrixToCsv(m, "note");
  EXPECT_EQ(csv.rfind("# note\n", 0), 0u);
  const auto back = MatrixFromCsv(csv, Catalog());
  EXPECT_EQ(back.catalog(), m.catalog());
  EXPECT_EQ(back.data(), m.data());
  EXPECT_EQ(back.labels(), m.labels());
  EXPECT_EQ(MatrixToCsv(back, "note"), csv);
}

TEST(MatrixCsv, UnknownColumn) {
  EXPECT_EQ(CodeOf([] { MatrixFromCsv("bogus,label\n1,0\n", Catalog()); }), ErrorCode::kUnknownFeature);
}

TEST(FeatureMatrix, SelectRowsAndColumns) {
  const auto corpus = SmallCorpus(5, 13);
  const auto m = ExtractMatrix(corpus, Catalog(), DefaultReferenceTime(corpus));
  const std::vector<std::size_t> rows = {4, 1};
  const auto sub = m.SelectRows(rows).SelectColumns(Subset(Catalog(), Selector::Named({"star", "name_length"})));
  ASSERT_EQ(sub.rows(), 2u);
  ASSERT_EQ(sub.cols(), 2u);
  EXPECT_EQ(sub.At(0, 0), m.At(4, Catalog().IndexOf("name_length")));
  EXPECT_EQ(sub.At(1, 1), m.At(1, Catalog().IndexOf("star")));
  EXPECT_EQ(sub.label(0), m.label(4));
}

TEST(FormatNumber, ShortestRoundTrip) {
  EXPECT_EQ(FormatNumber(3), "3");
  EXPECT_EQ(FormatNumber(0.5), "0.5");
  EXPECT_EQ(FormatNumber(0.1), "0.1");
  const double x = Ccs(365, 7);
  EXPECT_EQ(std::stod(FormatNumber(x)), x);
}

}  // namespace
}  // namespace memptec
