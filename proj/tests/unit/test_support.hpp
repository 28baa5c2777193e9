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

#include <gtest/gtest.h>

#include <filesystem>
#include <string>
#include <vector>

#include "memptec/catalog.hpp"
#include "memptec/error.hpp"
#include "memptec/features.hpp"
#include "memptec/registry.hpp"
#include "memptec/util.hpp"

namespace memptec::test {

inline std::filesystem::path Fixture(const std::string& name) {
  return std::filesystem::path(MEMPTEC_FIXTURE_DIR) / name;
}

inline std::string FixtureText(const std::string& name) { return ReadFile(Fixture(name)); }

// Fresh empty directory under the system temp dir.
inline std::filesystem::path TempDir(const std::string& tag) {
  const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
  std::string name = "memptec-" + tag;
  if (info) name += std::string("-") + info->test_suite_name() + "-" + info->name();
  const auto dir = std::filesystem::temp_directory_path() / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

// Catalog of `n` count features named f0..f(n-1).
inline FeatureCatalog ToyCatalog(std::size_t n) {
  std::vector<FeatureDescriptor> f;
  for (std::size_t j = 0; j < n; ++j) {
    f.push_back({"f" + std::to_string(j), FeatureClass::kETM, false, false, "toy", ValueKind::kCount});
  }
  return FeatureCatalog(std::move(f));
}

// Uniform features in [0,1); label = (x[signal] > 0.5).
inline FeatureMatrix ThresholdToy(std::size_t rows, std::size_t cols, std::size_t signal, std::uint64_t seed) {
  FeatureMatrix m(ToyCatalog(cols));
  Rng rng(seed);
  std::vector<double> row(cols);
  for (std::size_t i = 0; i < rows; ++i) {
    for (auto& v : row) v = rng.Uniform();
    m.AppendRow(row, row[signal] > 0.5 ? 1 : 0);
  }
  return m;
}

template <typename Fn>
ErrorCode CodeOf(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an Error";
  return ErrorCode::kIo;
}

}  // namespace memptec::test
