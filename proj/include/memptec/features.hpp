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

// Feature extraction: PackageMetadata -> numeric vector under a catalog and a
// reference time.

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "memptec/catalog.hpp"
#include "memptec/pmi.hpp"
#include "memptec/timestamp.hpp"

namespace memptec {

struct FeatureVector {
  std::string package_name;
  std::vector<double> values;  // aligned with catalog order
};

// Dense row-major matrix with one row per package and binary labels.
class FeatureMatrix {
 public:
  FeatureMatrix() = default;
  explicit FeatureMatrix(FeatureCatalog catalog) : catalog_(std::move(catalog)) {}

  const FeatureCatalog& catalog() const { return catalog_; }
  std::size_t rows() const { return labels_.size(); }
  std::size_t cols() const { return catalog_.size(); }
  bool empty() const { return labels_.empty(); }

  std::span<const double> Row(std::size_t i) const { return {data_.data() + i * cols(), cols()}; }
  std::span<double> MutableRow(std::size_t i) { return {data_.data() + i * cols(), cols()}; }
  double At(std::size_t i, std::size_t j) const { return data_[i * cols() + j]; }
  double& At(std::size_t i, std::size_t j) { return data_[i * cols() + j]; }

  const std::vector<int>& labels() const { return labels_; }
  int label(std::size_t i) const { return labels_[i]; }
  const std::vector<std::string>& package_names() const { return names_; }
  const std::vector<double>& data() const { return data_; }

  void AppendRow(std::span<const double> values, int label, std::string package_name = {});
  // Pre-sizes storage; rows are then filled with SetRow.
  void Resize(std::size_t rows);
  void SetRow(std::size_t i, std::span<const double> values, int label, std::string package_name = {});

  FeatureMatrix SelectRows(std::span<const std::size_t> indices) const;
  // Re-projects onto `sub`, whose features must all exist in this matrix.
  FeatureMatrix SelectColumns(const FeatureCatalog& sub) const;

  bool operator==(const FeatureMatrix& other) const {
    return catalog_ == other.catalog_ && data_ == other.data_ && labels_ == other.labels_ &&
           names_ == other.names_;
  }

 private:
  FeatureCatalog catalog_;
  std::vector<double> data_;
  std::vector<int> labels_;
  std::vector<std::string> names_;
};

// Community contribution score: log_base(1 + service_time) * log_base(1 + cpn).
// Throws kBadBase when base <= 1 and kInvalidArgument on negative inputs.
double Ccs(double service_time_days, double cpn, double base = 2.0);

// Throws kClockSkew when reference_time precedes created_time and
// kUnknownFeature for catalog entries without an extractor.
FeatureVector Extract(const PackageMetadata& pmi, const FeatureCatalog& cat, Timestamp reference_time,
                      double ccs_base = 2.0);

// Row i corresponds to corpus[i]. Rows may be computed on `jobs` threads;
// the result does not depend on it.
FeatureMatrix ExtractMatrix(const std::vector<LabeledPMI>& corpus, const FeatureCatalog& cat,
                            Timestamp reference_time, int jobs = 1, double ccs_base = 2.0);

// Newest modified_time in the corpus (falling back to created/published
// times), so runs do not depend on the wall clock.
Timestamp DefaultReferenceTime(const std::vector<LabeledPMI>& corpus);

// CSV with header "<feature names...>,label". `comment`, when non-empty, is
// written first as a '#'-prefixed line; readers skip such lines.
std::string MatrixToCsv(const FeatureMatrix& m, std::string_view comment = {});
// Column names are resolved against `parent`.
FeatureMatrix MatrixFromCsv(std::string_view csv, const FeatureCatalog& parent = ExtendedCatalog());

// Shortest round-tripping decimal text for a double ("3", "0.5", "25.547...").
std::string FormatNumber(double v);

}  // namespace memptec
