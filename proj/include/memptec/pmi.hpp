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

// Package metadata information (PMI): the key/value metadata document of one
// registry package, normalized into a fixed schema.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "memptec/timestamp.hpp"

namespace memptec {

struct Person {
  std::optional<std::string> name;
  std::optional<std::string> email;

  bool operator==(const Person&) const = default;
};

// Lowercased, trimmed "name|email" pair identifying a stakeholder across
// packages.
std::string PersonId(const Person& person);

struct InteractionCounts {
  std::int64_t pull_request = 0;
  std::int64_t issues = 0;
  std::int64_t fork_number = 0;
  std::int64_t star = 0;
  std::int64_t subscriber_count = 0;

  bool operator==(const InteractionCounts&) const = default;
};

enum class Role { kAuthor, kMaintainer, kContributor, kPublisher };

std::string_view RoleName(Role role);
std::optional<Role> ParseRole(std::string_view name);

struct StakeholderRecord {
  Role role = Role::kAuthor;
  Timestamp first_seen{};
  // Contributed package number (CPN): distinct packages the person is attached to.
  std::int64_t contributed_package_count = 0;

  bool operator==(const StakeholderRecord&) const = default;
};

using StringMap = std::map<std::string, std::string>;

struct PackageMetadata {
  std::string package_name;
  std::string version;
  std::optional<std::string> description;
  std::optional<std::string> readme;
  std::optional<StringMap> scripts;
  std::optional<StringMap> distribution_tags;
  std::vector<Person> authors;
  std::vector<Person> contributors;
  std::vector<Person> maintainers;
  std::vector<Person> publishers;
  std::optional<std::string> licenses;
  StringMap dependencies;
  StringMap development_dependencies;
  Timestamp created_time{};
  std::optional<Timestamp> modified_time;
  std::map<std::string, Timestamp> published_times;
  std::optional<std::string> npm_link;
  std::optional<std::string> homepage_link;
  std::optional<std::string> github_link;
  std::optional<std::string> bugs_link;
  std::optional<std::string> issues_link;
  std::vector<std::string> keywords;
  std::optional<std::int64_t> tags;
  std::optional<StringMap> directories;
  InteractionCounts interactions;
  std::map<std::string, StakeholderRecord> stakeholder_history;
  // When the raw document was retrieved, if known.
  std::optional<Timestamp> fetch_time;

  // Unknown top-level keys, preserved verbatim and ignored by extraction.
  nlohmann::json extra = nlohmann::json::object();
  // Non-fatal parse problems (e.g. unparseable timestamps). Diagnostics only:
  // not serialized and ignored by operator==.
  std::vector<std::string> warnings;

  const std::vector<Person>& Stakeholders(Role role) const;

  bool operator==(const PackageMetadata& other) const;
};

struct LabeledPMI {
  PackageMetadata metadata;
  int label = 0;  // 0 benign, 1 malicious

  bool operator==(const LabeledPMI&) const = default;
};

// Parses a registry document (registry.npmjs.org packument shape or the
// canonical form written by SerializePmi). Throws Error with kMalformedDocument
// or kMissingName.
PackageMetadata ParsePmi(std::string_view raw_document);
PackageMetadata ParsePmiJson(const nlohmann::json& document);

// Canonical JSON form; ParsePmi(SerializePmi(p)) == p.
nlohmann::json SerializePmi(const PackageMetadata& pmi);

struct Violation {
  std::string field;
  std::string rule;

  bool operator==(const Violation&) const = default;
};

using ValidationReport = std::vector<Violation>;

// Empty report iff every schema invariant holds. Rules: "empty-name",
// "time-order", "empty-person", "negative-count", "bad-cpn".
ValidationReport ValidatePmi(const PackageMetadata& pmi);

}  // namespace memptec
