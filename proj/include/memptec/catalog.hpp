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

// The fixed, ordered feature set. Column order of every feature matrix is the
// order of the catalog it was extracted with.

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace memptec {

// ETM: easy to manipulate. DTM: difficult to manipulate, i.e. monotonic or
// outside the stakeholder's control.
enum class FeatureClass { kETM, kDTM };
enum class ValueKind { kBinary, kCount, kLength, kDurationDays, kScore };

std::string_view FeatureClassName(FeatureClass klass);
std::string_view ValueKindName(ValueKind kind);

struct FeatureDescriptor {
  std::string name;
  FeatureClass klass = FeatureClass::kETM;
  bool monotonic = false;           // value can only move one way under legitimate updates
  bool restricted_control = false;  // stakeholders cannot set the value directly
  std::string source_information;   // metadata key the feature derives from
  ValueKind value_kind = ValueKind::kBinary;

  bool operator==(const FeatureDescriptor&) const = default;
};

class FeatureCatalog {
 public:
  FeatureCatalog() = default;
  explicit FeatureCatalog(std::vector<FeatureDescriptor> features);

  std::size_t size() const { return features_.size(); }
  bool empty() const { return features_.empty(); }
  const FeatureDescriptor& operator[](std::size_t i) const { return features_[i]; }
  auto begin() const { return features_.begin(); }
  auto end() const { return features_.end(); }

  std::optional<std::size_t> Find(std::string_view name) const;
  // Throws Error(kUnknownFeature).
  std::size_t IndexOf(std::string_view name) const;
  const FeatureDescriptor& Get(std::string_view name) const { return features_[IndexOf(name)]; }

  std::size_t Count(FeatureClass klass) const;
  std::vector<std::string> Names() const;

  // FNV-1a over the ordered names, each followed by a newline.
  std::uint64_t Fingerprint() const;

  bool operator==(const FeatureCatalog& other) const { return features_ == other.features_; }

 private:
  std::vector<FeatureDescriptor> features_;
  std::unordered_map<std::string, std::size_t> index_;
};

// Canonical 56-feature catalog: 36 ETM followed by 20 DTM.
const FeatureCatalog& Catalog();

// Canonical catalog plus the name_special_char ETM feature (right after
// name_length). Not used by any default feature set.
const FeatureCatalog& ExtendedCatalog();

// The 11-feature baseline modelled on earlier metadata-only detectors.
const std::vector<std::string>& DefaultExistingTec();

struct Selector {
  enum class Kind { kAll, kEtmOnly, kDtmOnly, kExistingTec, kNamed };
  Kind kind = Kind::kAll;
  std::vector<std::string> names;  // kNamed only

  static Selector All() { return {Kind::kAll, {}}; }
  static Selector EtmOnly() { return {Kind::kEtmOnly, {}}; }
  static Selector DtmOnly() { return {Kind::kDtmOnly, {}}; }
  static Selector ExistingTec() { return {Kind::kExistingTec, {}}; }
  static Selector Named(std::vector<std::string> n) { return {Kind::kNamed, std::move(n)}; }
};

// Order is always the parent's. Named selections and the existing_tec list
// must reference features of `parent` (kUnknownFeature otherwise).
FeatureCatalog Subset(const FeatureCatalog& parent, const Selector& selector,
                      const std::vector<std::string>& existing_tec = DefaultExistingTec());

// Feature-set names used on the command line and in reports:
// existing_tec, memptec_e, memptec_d, memptec.
Selector FeatureSetSelector(std::string_view feature_set);
const std::vector<std::string>& FeatureSetNames();

// Information key -> member features, in catalog order.
std::map<std::string, std::vector<std::string>> InformationGrouping(const FeatureCatalog& cat);

// name,class,monotonic,restricted_control,source_information,value_kind
std::string CatalogCsv(const FeatureCatalog& cat);

}  // namespace memptec
