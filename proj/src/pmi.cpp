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

#include "memptec/pmi.hpp"

#include <algorithm>
#include <set>
#include <tuple>

#include "memptec/error.hpp"
#include "memptec/util.hpp"

namespace memptec {

using nlohmann::json;

namespace {

// Top-level keys consumed by the parser; everything else lands in `extra`.
const std::set<std::string>& KnownKeys() {
  static const std::set<std::string> keys = {
      "name",        "version",      "description",     "readme",   "scripts",
      "dist-tags",   "author",       "authors",         "contributors",
      "maintainers", "publishers",   "license",         "licenses", "dependencies",
      "devDependencies", "time",     "homepage",        "repository", "bugs",
      "issues",      "issues_link",  "npm_link",        "keywords", "tags",
      "directories", "interactions", "stakeholder_history", "fetch_time", "versions"};
  return keys;
}

std::optional<std::string> NonEmptyString(const json& v) {
  if (v.is_string()) {
    auto s = v.get<std::string>();
    if (!s.empty()) return s;
  }
  return std::nullopt;
}

std::string ValueAsString(const json& v) {
  return v.is_string() ? v.get<std::string>() : v.dump();
}

std::optional<StringMap> ParseStringMap(const json& v) {
  if (!v.is_object()) return std::nullopt;
  StringMap out;
  for (auto it = v.begin(); it != v.end(); ++it) out.emplace(it.key(), ValueAsString(it.value()));
  return out;
}

// "Name <email> (url)" shorthand used by package.json.
Person ParsePersonString(std::string_view s) {
  Person p;
  std::string rest(s);
  const auto lt = rest.find('<');
  const auto gt = rest.find('>', lt == std::string::npos ? 0 : lt);
  if (lt != std::string::npos && gt != std::string::npos) {
    auto email = TrimAscii(std::string_view(rest).substr(lt + 1, gt - lt - 1));
    if (!email.empty()) p.email = email;
    rest.erase(lt, gt - lt + 1);
  }
  const auto lp = rest.find('(');
  if (lp != std::string::npos) rest.erase(lp);
  auto name = TrimAscii(rest);
  if (!name.empty()) p.name = name;
  return p;
}

Person ParsePerson(const json& v) {
  if (v.is_string()) return ParsePersonString(v.get<std::string>());
  Person p;
  if (v.is_object()) {
    if (auto it = v.find("name"); it != v.end()) p.name = NonEmptyString(*it);
    if (auto it = v.find("email"); it != v.end()) p.email = NonEmptyString(*it);
  }
  return p;
}

// Registries store people as one object, a string, or a list of either.
std::vector<Person> ParsePeople(const json& v) {
  std::vector<Person> out;
  if (v.is_array()) {
    for (const auto& e : v) out.push_back(ParsePerson(e));
  } else if (v.is_object() || v.is_string()) {
    out.push_back(ParsePerson(v));
  }
  return out;
}

std::optional<std::string> UrlOf(const json& v) {
  if (v.is_string()) return NonEmptyString(v);
  if (v.is_object()) {
    if (auto it = v.find("url"); it != v.end()) return NonEmptyString(*it);
  }
  return std::nullopt;
}

bool IsGithubUrl(std::string_view url) {
  const auto lower = ToLowerAscii(url);
  return lower.find("github.com") != std::string::npos || lower.rfind("github:", 0) == 0;
}

std::int64_t ReadCount(const json& obj, const char* key, std::vector<std::string>& warnings) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return 0;
  if (it->is_number_integer() || it->is_number_unsigned()) return it->get<std::int64_t>();
  if (it->is_number_float()) return static_cast<std::int64_t>(it->get<double>());
  warnings.push_back(std::string("non-numeric interaction count '") + key + "'");
  return 0;
}

// Picks where per-version fields live: the latest version's manifest when the
// document is a registry packument, otherwise the document itself.
const json& LatestManifest(const json& doc, const std::string& version) {
  if (auto v = doc.find("versions"); v != doc.end() && v->is_object()) {
    if (auto m = v->find(version); m != v->end() && m->is_object()) return *m;
  }
  return doc;
}

const json* Lookup(const json& doc, const json& manifest, const char* key) {
  if (auto it = doc.find(key); it != doc.end() && !it->is_null()) return &*it;
  if (&manifest != &doc) {
    if (auto it = manifest.find(key); it != manifest.end() && !it->is_null()) return &*it;
  }
  return nullptr;
}

std::optional<std::string> ParseLicense(const json& v) {
  if (v.is_string()) return NonEmptyString(v);
  if (v.is_object()) {
    if (auto it = v.find("type"); it != v.end()) return NonEmptyString(*it);
  }
  if (v.is_array()) {
    std::string joined;
    for (const auto& e : v) {
      auto t = ParseLicense(e);
      if (!t) continue;
      if (!joined.empty()) joined += " OR ";
      joined += *t;
    }
    if (!joined.empty()) return joined;
  }
  return std::nullopt;
}

json PersonToJson(const Person& p) {
  json o = json::object();
  if (p.name) o["name"] = *p.name;
  if (p.email) o["email"] = *p.email;
  return o;
}

json PeopleToJson(const std::vector<Person>& people) {
  json a = json::array();
  for (const auto& p : people) a.push_back(PersonToJson(p));
  return a;
}

}  // namespace

std::string PersonId(const Person& person) {
  return ToLowerAscii(TrimAscii(person.name.value_or(""))) + "|" +
         ToLowerAscii(TrimAscii(person.email.value_or("")));
}

std::string_view RoleName(Role role) {
  switch (role) {
    case Role::kAuthor: return "author";
    case Role::kMaintainer: return "maintainer";
    case Role::kContributor: return "contributor";
    case Role::kPublisher: return "publisher";
  }
  return "author";
}

std::optional<Role> ParseRole(std::string_view name) {
  if (name == "author") return Role::kAuthor;
  if (name == "maintainer") return Role::kMaintainer;
  if (name == "contributor") return Role::kContributor;
  if (name == "publisher") return Role::kPublisher;
  return std::nullopt;
}

const std::vector<Person>& PackageMetadata::Stakeholders(Role role) const {
  switch (role) {
    case Role::kAuthor: return authors;
    case Role::kMaintainer: return maintainers;
    case Role::kContributor: return contributors;
    case Role::kPublisher: return publishers;
  }
  return authors;
}

bool PackageMetadata::operator==(const PackageMetadata& o) const {
  auto fields = [](const PackageMetadata& m) {
    return std::tie(m.package_name, m.version, m.description, m.readme, m.scripts, m.distribution_tags,
                    m.authors, m.contributors, m.maintainers, m.publishers, m.licenses, m.dependencies,
                    m.development_dependencies, m.created_time, m.modified_time, m.published_times,
                    m.npm_link, m.homepage_link, m.github_link, m.bugs_link, m.issues_link, m.keywords,
                    m.tags, m.directories, m.interactions, m.stakeholder_history, m.fetch_time, m.extra);
  };
  return fields(*this) == fields(o);
}

PackageMetadata ParsePmi(std::string_view raw_document) {
  json doc = json::parse(raw_document, nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded()) throw Error(ErrorCode::kMalformedDocument, "document is not valid JSON");
  return ParsePmiJson(doc);
}

PackageMetadata ParsePmiJson(const json& doc) {
  if (!doc.is_object()) throw Error(ErrorCode::kMalformedDocument, "document is not a JSON object");

  PackageMetadata p;
  auto& warnings = p.warnings;

  auto name = doc.find("name");
  if (name == doc.end() || !name->is_string() || name->get<std::string>().empty()) {
    throw Error(ErrorCode::kMissingName, "document has no package name");
  }
  p.package_name = name->get<std::string>();

  if (auto tags = doc.find("dist-tags"); tags != doc.end()) {
    p.distribution_tags = ParseStringMap(*tags);
  }
  if (auto v = doc.find("version"); v != doc.end() && v->is_string()) {
    p.version = v->get<std::string>();
  } else if (p.distribution_tags && p.distribution_tags->count("latest")) {
    p.version = p.distribution_tags->at("latest");
  }
  const json& manifest = LatestManifest(doc, p.version);

  if (auto v = Lookup(doc, manifest, "description")) p.description = NonEmptyString(*v);
  if (auto v = Lookup(doc, manifest, "readme")) p.readme = NonEmptyString(*v);
  if (auto v = Lookup(doc, manifest, "scripts")) p.scripts = ParseStringMap(*v);

  if (auto v = Lookup(doc, manifest, "author")) {
    p.authors = ParsePeople(*v);
  } else if (auto w = Lookup(doc, manifest, "authors")) {
    p.authors = ParsePeople(*w);
  }
  if (auto v = Lookup(doc, manifest, "contributors")) p.contributors = ParsePeople(*v);
  if (auto v = doc.find("maintainers"); v != doc.end()) {
    p.maintainers = ParsePeople(*v);
  } else if (&manifest != &doc && manifest.contains("maintainers")) {
    p.maintainers = ParsePeople(manifest["maintainers"]);
  }

  if (auto v = Lookup(doc, manifest, "license")) {
    p.licenses = ParseLicense(*v);
  } else if (auto w = Lookup(doc, manifest, "licenses")) {
    p.licenses = ParseLicense(*w);
  }
  if (auto v = Lookup(doc, manifest, "dependencies")) p.dependencies = ParseStringMap(*v).value_or(StringMap{});
  if (auto v = Lookup(doc, manifest, "devDependencies")) {
    p.development_dependencies = ParseStringMap(*v).value_or(StringMap{});
  }

  // Timestamps.
  std::optional<Timestamp> created;
  if (auto t = doc.find("time"); t != doc.end() && t->is_object()) {
    for (auto it = t->begin(); it != t->end(); ++it) {
      const std::string& key = it.key();
      if (key == "unpublished") continue;
      std::optional<Timestamp> ts;
      if (it->is_string()) ts = ParseTimestamp(it->get<std::string>());
      if (!ts) {
        warnings.push_back("BadTimestamp: time." + key);
        continue;
      }
      if (key == "created") {
        created = ts;
      } else if (key == "modified") {
        p.modified_time = ts;
      } else {
        p.published_times.emplace(key, *ts);
      }
    }
  }
  if (created) {
    p.created_time = *created;
  } else if (!p.published_times.empty()) {
    p.created_time = std::min_element(p.published_times.begin(), p.published_times.end(),
                                      [](const auto& a, const auto& b) { return a.second < b.second; })
                         ->second;
    warnings.push_back("created_time missing; using earliest published time");
  } else {
    warnings.push_back("created_time missing");
  }

  if (auto v = doc.find("publishers"); v != doc.end()) {
    p.publishers = ParsePeople(*v);
  } else if (auto versions = doc.find("versions"); versions != doc.end() && versions->is_object()) {
    // Registry packuments record the publishing account per version; collect
    // the distinct accounts in publish order.
    std::vector<std::pair<Timestamp, std::string>> order;
    for (auto it = versions->begin(); it != versions->end(); ++it) {
      auto when = p.published_times.find(it.key());
      order.emplace_back(when == p.published_times.end() ? Timestamp::max() : when->second, it.key());
    }
    std::stable_sort(order.begin(), order.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    std::set<std::string> seen;
    for (const auto& [when, ver] : order) {
      const json& m = (*versions)[ver];
      if (!m.is_object() || !m.contains("_npmUser")) continue;
      Person person = ParsePerson(m["_npmUser"]);
      if (seen.insert(PersonId(person)).second) p.publishers.push_back(person);
    }
  }

  if (auto v = doc.find("npm_link"); v != doc.end()) p.npm_link = UrlOf(*v);
  if (auto v = Lookup(doc, manifest, "homepage")) p.homepage_link = UrlOf(*v);
  if (auto v = Lookup(doc, manifest, "repository")) {
    auto url = UrlOf(*v);
    if (url && IsGithubUrl(*url)) {
      p.github_link = url;
    } else if (doc.contains("repository")) {
      p.extra["repository"] = doc["repository"];
    }
  }
  if (auto v = Lookup(doc, manifest, "bugs")) p.bugs_link = UrlOf(*v);
  if (auto v = doc.find("issues_link"); v != doc.end()) {
    p.issues_link = UrlOf(*v);
  } else if (auto w = doc.find("issues"); w != doc.end()) {
    p.issues_link = UrlOf(*w);
  }

  if (auto v = Lookup(doc, manifest, "keywords")) {
    if (v->is_array()) {
      for (const auto& k : *v) {
        if (k.is_string() && !k.get<std::string>().empty()) p.keywords.push_back(k.get<std::string>());
      }
    } else if (v->is_string()) {
      for (auto& k : SplitString(v->get<std::string>(), ',')) {
        auto t = TrimAscii(k);
        if (!t.empty()) p.keywords.push_back(t);
      }
    }
  }
  if (auto v = doc.find("tags"); v != doc.end()) {
    if (v->is_number_integer() || v->is_number_unsigned()) {
      p.tags = v->get<std::int64_t>();
    } else if (v->is_array()) {
      p.tags = static_cast<std::int64_t>(v->size());
    }
  }
  if (auto v = Lookup(doc, manifest, "directories")) p.directories = ParseStringMap(*v);

  if (auto v = doc.find("interactions"); v != doc.end() && v->is_object()) {
    p.interactions.pull_request = ReadCount(*v, "pull_request", warnings);
    p.interactions.issues = ReadCount(*v, "issues", warnings);
    p.interactions.fork_number = ReadCount(*v, "fork_number", warnings);
    p.interactions.star = ReadCount(*v, "star", warnings);
    p.interactions.subscriber_count = ReadCount(*v, "subscriber_count", warnings);
  }

  if (auto v = doc.find("stakeholder_history"); v != doc.end() && v->is_object()) {
    for (auto it = v->begin(); it != v->end(); ++it) {
      const json& rec = it.value();
      if (!rec.is_object()) continue;
      StakeholderRecord r;
      if (auto role = rec.find("role"); role != rec.end() && role->is_string()) {
        r.role = ParseRole(role->get<std::string>()).value_or(Role::kAuthor);
      }
      std::optional<Timestamp> first_seen;
      if (auto fs = rec.find("first_seen"); fs != rec.end() && fs->is_string()) {
        first_seen = ParseTimestamp(fs->get<std::string>());
      }
      if (!first_seen) {
        warnings.push_back("BadTimestamp: stakeholder_history." + it.key());
        continue;
      }
      r.first_seen = *first_seen;
      if (auto cpn = rec.find("cpn"); cpn != rec.end() && cpn->is_number()) {
        r.contributed_package_count = cpn->get<std::int64_t>();
      }
      p.stakeholder_history.emplace(it.key(), r);
    }
  }
  if (auto v = doc.find("fetch_time"); v != doc.end() && v->is_string()) {
    p.fetch_time = ParseTimestamp(v->get<std::string>());
    if (!p.fetch_time) warnings.push_back("BadTimestamp: fetch_time");
  }

  for (auto it = doc.begin(); it != doc.end(); ++it) {
    if (!KnownKeys().count(it.key())) p.extra[it.key()] = it.value();
  }
  return p;
}

json SerializePmi(const PackageMetadata& p) {
  json doc = p.extra.is_object() ? p.extra : json::object();
  doc["name"] = p.package_name;
  doc["version"] = p.version;
  if (p.description) doc["description"] = *p.description;
  if (p.readme) doc["readme"] = *p.readme;
  if (p.scripts) doc["scripts"] = *p.scripts;
  if (p.distribution_tags) doc["dist-tags"] = *p.distribution_tags;
  doc["author"] = PeopleToJson(p.authors);
  doc["contributors"] = PeopleToJson(p.contributors);
  doc["maintainers"] = PeopleToJson(p.maintainers);
  doc["publishers"] = PeopleToJson(p.publishers);
  if (p.licenses) doc["license"] = *p.licenses;
  doc["dependencies"] = p.dependencies;
  doc["devDependencies"] = p.development_dependencies;

  json time = json::object();
  // created_time is always materialized so the record reparses identically.
  time["created"] = FormatTimestamp(p.created_time);
  if (p.modified_time) time["modified"] = FormatTimestamp(*p.modified_time);
  for (const auto& [ver, ts] : p.published_times) time[ver] = FormatTimestamp(ts);
  doc["time"] = time;

  if (p.npm_link) doc["npm_link"] = *p.npm_link;
  if (p.homepage_link) doc["homepage"] = *p.homepage_link;
  if (p.github_link) doc["repository"] = json{{"type", "git"}, {"url", *p.github_link}};
  if (p.bugs_link) doc["bugs"] = json{{"url", *p.bugs_link}};
  if (p.issues_link) doc["issues_link"] = *p.issues_link;
  doc["keywords"] = p.keywords;
  if (p.tags) doc["tags"] = *p.tags;
  if (p.directories) doc["directories"] = *p.directories;
  doc["interactions"] = json{{"pull_request", p.interactions.pull_request},
                             {"issues", p.interactions.issues},
                             {"fork_number", p.interactions.fork_number},
                             {"star", p.interactions.star},
                             {"subscriber_count", p.interactions.subscriber_count}};
  json history = json::object();
  for (const auto& [id, rec] : p.stakeholder_history) {
    history[id] = json{{"role", RoleName(rec.role)},
                       {"first_seen", FormatTimestamp(rec.first_seen)},
                       {"cpn", rec.contributed_package_count}};
  }
  doc["stakeholder_history"] = history;
  if (p.fetch_time) doc["fetch_time"] = FormatTimestamp(*p.fetch_time);
  return doc;
}

ValidationReport ValidatePmi(const PackageMetadata& p) {
  ValidationReport report;
  if (p.package_name.empty()) report.push_back({"package_name", "empty-name"});
  if (p.modified_time && *p.modified_time < p.created_time) {
    report.push_back({"modified_time", "time-order"});
  }
  for (const auto& [ver, ts] : p.published_times) {
    if (ts < p.created_time) report.push_back({"published_times." + ver, "time-order"});
  }
  const std::pair<const char*, const std::vector<Person>*> groups[] = {
      {"authors", &p.authors},
      {"contributors", &p.contributors},
      {"maintainers", &p.maintainers},
      {"publishers", &p.publishers}};
  for (const auto& [field, people] : groups) {
    for (std::size_t i = 0; i < people->size(); ++i) {
      const Person& person = (*people)[i];
      if (!person.name && !person.email) {
        report.push_back({std::string(field) + "[" + std::to_string(i) + "]", "empty-person"});
      }
    }
  }
  const std::pair<const char*, std::int64_t> counts[] = {
      {"interactions.pull_request", p.interactions.pull_request},
      {"interactions.issues", p.interactions.issues},
      {"interactions.fork_number", p.interactions.fork_number},
      {"interactions.star", p.interactions.star},
      {"interactions.subscriber_count", p.interactions.subscriber_count}};
  for (const auto& [field, value] : counts) {
    if (value < 0) report.push_back({field, "negative-count"});
  }
  for (const auto& [id, rec] : p.stakeholder_history) {
    if (rec.contributed_package_count < 1) report.push_back({"stakeholder_history." + id, "bad-cpn"});
  }
  return report;
}

}  // namespace memptec
