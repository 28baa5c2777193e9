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

#include "memptec/catalog.hpp"

#include "memptec/error.hpp"
#include "memptec/util.hpp"

namespace memptec {
namespace {

FeatureDescriptor Etm(std::string name, std::string source, ValueKind kind) {
  return {std::move(name), FeatureClass::kETM, false, false, std::move(source), kind};
}

FeatureDescriptor Monotonic(std::string name, std::string source, ValueKind kind) {
  return {std::move(name), FeatureClass::kDTM, true, false, std::move(source), kind};
}

FeatureDescriptor Restricted(std::string name) {
  return {std::move(name), FeatureClass::kDTM, false, true, "interactions", ValueKind::kCount};
}

std::vector<FeatureDescriptor> CanonicalFeatures() {
  using VK = ValueKind;
  std::vector<FeatureDescriptor> f = {
      Etm("name_exist", "package_name", VK::kBinary),
      Etm("name_length", "package_name", VK::kLength),
      Etm("dist-tags_exist", "distribution_tag", VK::kBinary),
      Etm("dist-tags_length", "distribution_tag", VK::kLength),
      Etm("versions_exist", "version", VK::kBinary),
      Etm("versions_length", "version", VK::kLength),
      Etm("versions_num_count", "version", VK::kCount),
      Etm("maintainers_exist", "maintainers", VK::kBinary),
      Etm("description_exist", "description", VK::kBinary),
      Etm("description_length", "description", VK::kLength),
      Etm("readme_exist", "readme", VK::kBinary),
      Etm("readme_length", "readme", VK::kLength),
      Etm("scripts_exist", "scripts", VK::kBinary),
      Etm("scripts_length", "scripts", VK::kLength),
      Etm("author_exist", "authors", VK::kBinary),
      Etm("author_name", "authors", VK::kBinary),
      Etm("author_email", "authors", VK::kBinary),
      Etm("License_exist", "licenses", VK::kBinary),
      Etm("License_length", "licenses", VK::kLength),
      Etm("directories_exist", "directories", VK::kBinary),
      Etm("directories_length", "directories", VK::kLength),
      Etm("keywords_exist", "keywords", VK::kBinary),
      Etm("keywords_length", "keywords", VK::kLength),
      Etm("keywords_num_count", "keywords", VK::kCount),
      Etm("homepage_exist", "homepage_link", VK::kBinary),
      Etm("homepage_length", "homepage_link", VK::kLength),
      Etm("github_exist", "github_link", VK::kBinary),
      Etm("github_length", "github_link", VK::kLength),
      Etm("bugslink_exist", "bugs_link", VK::kBinary),
      Etm("bugslink_length", "bugs_link", VK::kLength),
      Etm("issueslink_exist", "issues_link", VK::kBinary),
      Etm("issueslink_length", "issues_link", VK::kLength),
      Etm("dependencies_exist", "dependencies", VK::kBinary),
      Etm("dependencies_length", "dependencies", VK::kLength),
      Etm("devDependencies_exist", "development_dependencies", VK::kBinary),
      Etm("devDependencies_length", "development_dependencies", VK::kLength),

      Monotonic("package_age", "created_time", VK::kDurationDays),
      Monotonic("package_modified_duration", "modified_time", VK::kDurationDays),
      Monotonic("package_published_duration", "published_time", VK::kDurationDays),
  };
  for (const char* role : {"author", "maintainer", "contributor", "publisher"}) {
    const std::string r(role);
    f.push_back(Monotonic(r + "_CPN", "stakeholder_history", VK::kCount));
    f.push_back(Monotonic(r + "_service_time", "stakeholder_history", VK::kDurationDays));
    f.push_back(Monotonic(r + "_CCS", "stakeholder_history", VK::kScore));
  }
  for (const char* name : {"pull_request", "issues", "fork_number", "star", "subscriber_count"}) {
    f.push_back(Restricted(name));
  }
  return f;
}

}  // namespace

std::string_view FeatureClassName(FeatureClass klass) {
  return klass == FeatureClass::kETM ? "ETM" : "DTM";
}

std::string_view ValueKindName(ValueKind kind) {
  switch (kind) {
    case ValueKind::kBinary: return "binary";
    case ValueKind::kCount: return "count";
    case ValueKind::kLength: return "length";
    case ValueKind::kDurationDays: return "duration_days";
    case ValueKind::kScore: return "score";
  }
  return "binary";
}

FeatureCatalog::FeatureCatalog(std::vector<FeatureDescriptor> features) : features_(std::move(features)) {
  for (std::size_t i = 0; i < features_.size(); ++i) {
    if (!index_.emplace(features_[i].name, i).second) {
      throw Error(ErrorCode::kInvalidArgument, "duplicate feature name '" + features_[i].name + "'");
    }
  }
}

std::optional<std::size_t> FeatureCatalog::Find(std::string_view name) const {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t FeatureCatalog::IndexOf(std::string_view name) const {
  auto i = Find(name);
  if (!i) throw Error(ErrorCode::kUnknownFeature, "unknown feature '" + std::string(name) + "'");
  return *i;
}

std::size_t FeatureCatalog::Count(FeatureClass klass) const {
  std::size_t n = 0;
  for (const auto& f : features_) n += f.klass == klass ? 1 : 0;
  return n;
}

std::vector<std::string> FeatureCatalog::Names() const {
  std::vector<std::string> names;
  names.reserve(features_.size());
  for (const auto& f : features_) names.push_back(f.name);
  return names;
}

std::uint64_t FeatureCatalog::Fingerprint() const {
  std::string joined;
  for (const auto& f : features_) {
    joined += f.name;
    joined += '\n';
  }
  return Fnv1a64(joined);
}

const FeatureCatalog& Catalog() {
  static const FeatureCatalog cat(CanonicalFeatures());
  return cat;
}

const FeatureCatalog& ExtendedCatalog() {
  static const FeatureCatalog cat = [] {
    auto f = CanonicalFeatures();
    f.insert(f.begin() + 2, Etm("name_special_char", "package_name", ValueKind::kCount));
    return FeatureCatalog(std::move(f));
  }();
  return cat;
}

const std::vector<std::string>& DefaultExistingTec() {
  static const std::vector<std::string> names = {
      "name_length",          "description_exist",     "readme_length",   "scripts_exist",
      "author_exist",         "maintainers_exist",     "dependencies_exist", "devDependencies_exist",
      "versions_length",      "homepage_exist",        "github_exist"};
  return names;
}

FeatureCatalog Subset(const FeatureCatalog& parent, const Selector& selector,
                      const std::vector<std::string>& existing_tec) {
  std::vector<bool> keep(parent.size(), false);
  switch (selector.kind) {
    case Selector::Kind::kAll:
      keep.assign(parent.size(), true);
      break;
    case Selector::Kind::kEtmOnly:
    case Selector::Kind::kDtmOnly: {
      const auto want = selector.kind == Selector::Kind::kEtmOnly ? FeatureClass::kETM : FeatureClass::kDTM;
      for (std::size_t i = 0; i < parent.size(); ++i) keep[i] = parent[i].klass == want;
      break;
    }
    case Selector::Kind::kExistingTec:
      for (const auto& n : existing_tec) keep[parent.IndexOf(n)] = true;
      break;
    case Selector::Kind::kNamed:
      for (const auto& n : selector.names) keep[parent.IndexOf(n)] = true;
      break;
  }
  std::vector<FeatureDescriptor> out;
  for (std::size_t i = 0; i < parent.size(); ++i) {
    if (keep[i]) out.push_back(parent[i]);
  }
  return FeatureCatalog(std::move(out));
}

Selector FeatureSetSelector(std::string_view feature_set) {
  if (feature_set == "existing_tec") return Selector::ExistingTec();
  if (feature_set == "memptec_e") return Selector::EtmOnly();
  if (feature_set == "memptec_d") return Selector::DtmOnly();
  if (feature_set == "memptec") return Selector::All();
  throw Error(ErrorCode::kInvalidArgument, "unknown feature set '" + std::string(feature_set) + "'");
}

const std::vector<std::string>& FeatureSetNames() {
  static const std::vector<std::string> names = {"existing_tec", "memptec_e", "memptec_d", "memptec"};
  return names;
}

std::map<std::string, std::vector<std::string>> InformationGrouping(const FeatureCatalog& cat) {
  std::map<std::string, std::vector<std::string>> groups;
  for (const auto& f : cat) groups[f.source_information].push_back(f.name);
  return groups;
}

std::string CatalogCsv(const FeatureCatalog& cat) {
  std::string out = "name,class,monotonic,restricted_control,source_information,value_kind\n";
  for (const auto& f : cat) {
    out += f.name;
    out += ',';
    out += FeatureClassName(f.klass);
    out += f.monotonic ? ",true" : ",false";
    out += f.restricted_control ? ",true," : ",false,";
    out += f.source_information;
    out += ',';
    out += ValueKindName(f.value_kind);
    out += '\n';
  }
  return out;
}

}  // namespace memptec
