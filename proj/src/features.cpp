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

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <unordered_map>

#include "json.hpp"
#include "memptec/error.hpp"
#include "memptec/util.hpp"

namespace memptec {

using nlohmann::json;

void FeatureMatrix::AppendRow(std::span<const double> values, int label, std::string package_name) {
  if (values.size() != cols()) {
    throw Error(ErrorCode::kLengthMismatch, "row has " + std::to_string(values.size()) + " values, catalog has " +
                                                std::to_string(cols()));
  }
  data_.insert(data_.end(), values.begin(), values.end());
  labels_.push_back(label);
  names_.push_back(std::move(package_name));
}

void FeatureMatrix::Resize(std::size_t rows) {
  data_.assign(rows * cols(), 0.0);
  labels_.assign(rows, 0);
  names_.assign(rows, std::string());
}

void FeatureMatrix::SetRow(std::size_t i, std::span<const double> values, int label, std::string package_name) {
  std::copy(values.begin(), values.end(), data_.begin() + static_cast<std::ptrdiff_t>(i * cols()));
  labels_[i] = label;
  names_[i] = std::move(package_name);
}

FeatureMatrix FeatureMatrix::SelectRows(std::span<const std::size_t> indices) const {
  FeatureMatrix out(catalog_);
  out.data_.reserve(indices.size() * cols());
  for (std::size_t i : indices) out.AppendRow(Row(i), labels_[i], names_[i]);
  return out;
}

FeatureMatrix FeatureMatrix::SelectColumns(const FeatureCatalog& sub) const {
  std::vector<std::size_t> source;
  for (const auto& f : sub) source.push_back(catalog_.IndexOf(f.name));
  FeatureMatrix out(sub);
  out.Resize(rows());
  std::vector<double> row(sub.size());
  for (std::size_t i = 0; i < rows(); ++i) {
    for (std::size_t j = 0; j < source.size(); ++j) row[j] = At(i, source[j]);
    out.SetRow(i, row, labels_[i], names_[i]);
  }
  return out;
}

double Ccs(double service_time_days, double cpn, double base) {
  if (!(base > 1.0)) throw Error(ErrorCode::kBadBase, "logarithm base must exceed 1");
  if (service_time_days < 0.0 || cpn < 0.0) throw Error(ErrorCode::kInvalidArgument, "ccs inputs must be >= 0");
  const double log_base = std::log(base);
  return (std::log1p(service_time_days) / log_base) * (std::log1p(cpn) / log_base);
}

namespace {

struct Context {
  const PackageMetadata& pmi;
  Timestamp reference;
  double ccs_base;
};

using Extractor = std::function<double(const Context&)>;

double Len(std::string_view s) { return static_cast<double>(Utf8Length(s)); }
double JsonLen(const json& j) { return Len(j.dump()); }
double Flag(bool b) { return b ? 1.0 : 0.0; }

template <typename T>
double OptLen(const std::optional<T>& v) {
  if (!v) return 0.0;
  if constexpr (std::is_same_v<T, std::string>) {
    return Len(*v);
  } else {
    return JsonLen(json(*v));
  }
}

template <typename T>
bool Present(const std::optional<T>& v) {
  return v.has_value() && !v->empty();
}

double Days(Timestamp from, Timestamp to) {
  return static_cast<double>(std::max<std::int64_t>(0, CalendarDaysBetween(from, to)));
}

json VersionList(const PackageMetadata& p) {
  json a = json::array();
  for (const auto& [ver, ts] : p.published_times) a.push_back(ver);
  return a;
}

struct StakeholderStats {
  double service_time = 0.0;
  double cpn = 0.0;
};

// Earliest-listed person of the role. Without a history record the person is
// known only through this package: first seen at its creation, CPN 1.
StakeholderStats Stakeholder(const Context& c, Role role) {
  const auto& people = c.pmi.Stakeholders(role);
  if (people.empty()) return {};
  const auto it = c.pmi.stakeholder_history.find(PersonId(people.front()));
  if (it == c.pmi.stakeholder_history.end()) {
    return {Days(c.pmi.created_time, c.reference), 1.0};
  }
  return {Days(it->second.first_seen, c.reference),
          static_cast<double>(std::max<std::int64_t>(0, it->second.contributed_package_count))};
}

const std::unordered_map<std::string, Extractor>& Extractors() {
  static const std::unordered_map<std::string, Extractor> table = [] {
    std::unordered_map<std::string, Extractor> t;
    t["name_exist"] = [](const Context& c) { return Flag(!c.pmi.package_name.empty()); };
    t["name_length"] = [](const Context& c) { return Len(c.pmi.package_name); };
    t["name_special_char"] = [](const Context& c) {
      double n = 0;
      for (unsigned char ch : c.pmi.package_name) {
        if (ch < 0x80 && !std::isalnum(ch) && !std::isspace(ch)) n += 1;
      }
      return n;
    };
    t["dist-tags_exist"] = [](const Context& c) { return Flag(Present(c.pmi.distribution_tags)); };
    t["dist-tags_length"] = [](const Context& c) { return OptLen(c.pmi.distribution_tags); };
    t["versions_exist"] = [](const Context& c) { return Flag(!c.pmi.published_times.empty()); };
    t["versions_length"] = [](const Context& c) {
      return c.pmi.published_times.empty() ? 0.0 : JsonLen(VersionList(c.pmi));
    };
    t["versions_num_count"] = [](const Context& c) { return static_cast<double>(c.pmi.published_times.size()); };
    t["maintainers_exist"] = [](const Context& c) { return Flag(!c.pmi.maintainers.empty()); };
    t["description_exist"] = [](const Context& c) { return Flag(Present(c.pmi.description)); };
    t["description_length"] = [](const Context& c) { return OptLen(c.pmi.description); };
    t["readme_exist"] = [](const Context& c) { return Flag(Present(c.pmi.readme)); };
    t["readme_length"] = [](const Context& c) { return OptLen(c.pmi.readme); };
    t["scripts_exist"] = [](const Context& c) { return Flag(Present(c.pmi.scripts)); };
    t["scripts_length"] = [](const Context& c) { return OptLen(c.pmi.scripts); };
    t["author_exist"] = [](const Context& c) { return Flag(!c.pmi.authors.empty()); };
    t["author_name"] = [](const Context& c) {
      return Flag(!c.pmi.authors.empty() && c.pmi.authors.front().name.has_value());
    };
    t["author_email"] = [](const Context& c) {
      return Flag(!c.pmi.authors.empty() && c.pmi.authors.front().email.has_value());
    };
    t["License_exist"] = [](const Context& c) { return Flag(Present(c.pmi.licenses)); };
    t["License_length"] = [](const Context& c) { return OptLen(c.pmi.licenses); };
    t["directories_exist"] = [](const Context& c) { return Flag(Present(c.pmi.directories)); };
    t["directories_length"] = [](const Context& c) { return OptLen(c.pmi.directories); };
    t["keywords_exist"] = [](const Context& c) { return Flag(!c.pmi.keywords.empty()); };
    t["keywords_length"] = [](const Context& c) { return c.pmi.keywords.empty() ? 0.0 : JsonLen(json(c.pmi.keywords)); };
    t["keywords_num_count"] = [](const Context& c) { return static_cast<double>(c.pmi.keywords.size()); };
    t["homepage_exist"] = [](const Context& c) { return Flag(Present(c.pmi.homepage_link)); };
    t["homepage_length"] = [](const Context& c) { return OptLen(c.pmi.homepage_link); };
    t["github_exist"] = [](const Context& c) { return Flag(Present(c.pmi.github_link)); };
    t["github_length"] = [](const Context& c) { return OptLen(c.pmi.github_link); };
    t["bugslink_exist"] = [](const Context& c) { return Flag(Present(c.pmi.bugs_link)); };
    t["bugslink_length"] = [](const Context& c) { return OptLen(c.pmi.bugs_link); };
    t["issueslink_exist"] = [](const Context& c) { return Flag(Present(c.pmi.issues_link)); };
    t["issueslink_length"] = [](const Context& c) { return OptLen(c.pmi.issues_link); };
    t["dependencies_exist"] = [](const Context& c) { return Flag(!c.pmi.dependencies.empty()); };
    t["dependencies_length"] = [](const Context& c) {
      return c.pmi.dependencies.empty() ? 0.0 : JsonLen(json(c.pmi.dependencies));
    };
    t["devDependencies_exist"] = [](const Context& c) { return Flag(!c.pmi.development_dependencies.empty()); };
    t["devDependencies_length"] = [](const Context& c) {
      return c.pmi.development_dependencies.empty() ? 0.0 : JsonLen(json(c.pmi.development_dependencies));
    };

    t["package_age"] = [](const Context& c) { return Days(c.pmi.created_time, c.reference); };
    t["package_modified_duration"] = [](const Context& c) {
      return c.pmi.modified_time ? Days(c.pmi.created_time, *c.pmi.modified_time) : 0.0;
    };
    t["package_published_duration"] = [](const Context& c) {
      if (c.pmi.published_times.empty()) return 0.0;
      Timestamp first = Timestamp::max();
      for (const auto& [ver, ts] : c.pmi.published_times) first = std::min(first, ts);
      return Days(c.pmi.created_time, first);
    };

    const std::pair<const char*, Role> roles[] = {{"author", Role::kAuthor},
                                                  {"maintainer", Role::kMaintainer},
                                                  {"contributor", Role::kContributor},
                                                  {"publisher", Role::kPublisher}};
    for (const auto& [prefix, role] : roles) {
      const std::string p(prefix);
      const Role r = role;
      t[p + "_CPN"] = [r](const Context& c) { return Stakeholder(c, r).cpn; };
      t[p + "_service_time"] = [r](const Context& c) { return Stakeholder(c, r).service_time; };
      t[p + "_CCS"] = [r](const Context& c) {
        const auto s = Stakeholder(c, r);
        return Ccs(s.service_time, s.cpn, c.ccs_base);
      };
    }

    t["pull_request"] = [](const Context& c) { return static_cast<double>(c.pmi.interactions.pull_request); };
    t["issues"] = [](const Context& c) { return static_cast<double>(c.pmi.interactions.issues); };
    t["fork_number"] = [](const Context& c) { return static_cast<double>(c.pmi.interactions.fork_number); };
    t["star"] = [](const Context& c) { return static_cast<double>(c.pmi.interactions.star); };
    t["subscriber_count"] = [](const Context& c) {
      return static_cast<double>(c.pmi.interactions.subscriber_count);
    };
    return t;
  }();
  return table;
}

}  // namespace

FeatureVector Extract(const PackageMetadata& pmi, const FeatureCatalog& cat, Timestamp reference_time,
                      double ccs_base) {
  if (!(ccs_base > 1.0)) throw Error(ErrorCode::kBadBase, "logarithm base must exceed 1");
  if (reference_time < pmi.created_time) {
    throw Error(ErrorCode::kClockSkew, "reference time " + FormatTimestamp(reference_time) +
                                           " precedes creation of '" + pmi.package_name + "' (" +
                                           FormatTimestamp(pmi.created_time) + ")");
  }
  const Context ctx{pmi, reference_time, ccs_base};
  const auto& table = Extractors();
  FeatureVector v;
  v.package_name = pmi.package_name;
  v.values.reserve(cat.size());
  for (const auto& f : cat) {
    auto it = table.find(f.name);
    if (it == table.end()) throw Error(ErrorCode::kUnknownFeature, "no extractor for '" + f.name + "'");
    v.values.push_back(it->second(ctx));
  }
  return v;
}

FeatureMatrix ExtractMatrix(const std::vector<LabeledPMI>& corpus, const FeatureCatalog& cat,
                            Timestamp reference_time, int jobs, double ccs_base) {
  if (corpus.empty()) throw Error(ErrorCode::kInvalidArgument, "corpus is empty");
  FeatureMatrix m(cat);
  m.Resize(corpus.size());
  ParallelFor(corpus.size(), jobs, [&](std::size_t i) {
    const auto& rec = corpus[i];
    try {
      FeatureVector v = Extract(rec.metadata, cat, reference_time, ccs_base);
      m.SetRow(i, v.values, rec.label, std::move(v.package_name));
    } catch (const Error& e) {
      throw Error(e.code(), "package[" + std::to_string(i) + "] '" + rec.metadata.package_name + "': " + e.what());
    }
  });
  return m;
}

Timestamp DefaultReferenceTime(const std::vector<LabeledPMI>& corpus) {
  std::optional<Timestamp> newest;
  auto consider = [&](Timestamp t) {
    if (!newest || t > *newest) newest = t;
  };
  for (const auto& rec : corpus) {
    if (rec.metadata.modified_time) consider(*rec.metadata.modified_time);
  }
  if (!newest) {
    for (const auto& rec : corpus) {
      consider(rec.metadata.created_time);
      for (const auto& [v, ts] : rec.metadata.published_times) consider(ts);
    }
  }
  return newest.value_or(Timestamp{});
}

std::string FormatNumber(double v) {
  if (v == 0.0) return "0";  // folds -0
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string MatrixToCsv(const FeatureMatrix& m, std::string_view comment) {
  std::string out;
  if (!comment.empty()) {
    out += "# ";
    out += comment;
    out += '\n';
  }
  for (const auto& f : m.catalog()) {
    out += f.name;
    out += ',';
  }
  out += "label\n";
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (double v : m.Row(i)) {
      out += FormatNumber(v);
      out += ',';
    }
    out += std::to_string(m.label(i));
    out += '\n';
  }
  return out;
}

FeatureMatrix MatrixFromCsv(std::string_view csv, const FeatureCatalog& parent) {
  std::vector<std::string> lines;
  for (auto& line : SplitString(csv, '\n')) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    lines.push_back(std::move(line));
  }
  if (lines.empty()) throw Error(ErrorCode::kMalformedDocument, "matrix csv has no header");
  auto header = SplitString(lines.front(), ',');
  if (header.empty() || header.back() != "label") {
    throw Error(ErrorCode::kMalformedDocument, "matrix csv header must end with 'label'");
  }
  header.pop_back();
  FeatureMatrix m(Subset(parent, Selector::Named(header)));
  if (m.catalog().Names() != header) {
    throw Error(ErrorCode::kMalformedDocument, "matrix csv columns are not in catalog order");
  }
  std::vector<double> row(header.size());
  for (std::size_t r = 1; r < lines.size(); ++r) {
    auto cells = SplitString(lines[r], ',');
    if (cells.size() != header.size() + 1) {
      throw Error(ErrorCode::kMalformedDocument, "matrix csv row " + std::to_string(r) + " has wrong width");
    }
    for (std::size_t j = 0; j < header.size(); ++j) {
      const auto& cell = cells[j];
      auto res = std::from_chars(cell.data(), cell.data() + cell.size(), row[j]);
      if (res.ec != std::errc() || res.ptr != cell.data() + cell.size()) {
        throw Error(ErrorCode::kMalformedDocument, "bad number '" + cell + "' in matrix csv row " + std::to_string(r));
      }
    }
    const int label = cells.back() == "1" ? 1 : cells.back() == "0" ? 0 : -1;
    if (label < 0) throw Error(ErrorCode::kBadLabel, "matrix csv row " + std::to_string(r));
    m.AppendRow(row, label);
  }
  return m;
}

}  // namespace memptec
