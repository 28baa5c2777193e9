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

#include <algorithm>
#include <cmath>
#include <set>

#include "memptec/catalog.hpp"
#include "memptec/error.hpp"

namespace memptec {

using nlohmann::json;

double Distribution::Sample(Rng& rng, const double* z, double rho) const {
  switch (kind) {
    case Kind::kConstant: return a;
    case Kind::kBernoulli: return rng.Bernoulli(a) ? 1.0 : 0.0;
    case Kind::kDerived: return 0.0;
    case Kind::kLogNormal: {
      if (p_zero > 0.0 && rng.Bernoulli(p_zero)) return 0.0;
      double e = rng.Normal();
      if (z != nullptr) e = rho * *z + std::sqrt(1.0 - rho * rho) * e;
      return a * std::exp(b * e);
    }
    case Kind::kUniform: {
      if (p_zero > 0.0 && rng.Bernoulli(p_zero)) return 0.0;
      return rng.Uniform(a, b);
    }
  }
  return 0.0;
}

namespace {

const std::set<std::string>& DerivedFeatures() {
  static const std::set<std::string> s = {"versions_length", "keywords_length", "License_length",
                                          "author_CCS",      "maintainer_CCS",  "contributor_CCS",
                                          "publisher_CCS"};
  return s;
}

// Features whose value the generator fixes structurally.
const std::set<std::string>& AlwaysPresent() {
  static const std::set<std::string> s = {"name_exist", "versions_exist"};
  return s;
}

using D = Distribution;

}  // namespace

SignalProfile DefaultProfile() {
  SignalProfile p;
  auto& f = p.features;
  auto pair = [&](const std::string& name, D benign, D malicious) { f[name] = {benign, malicious}; };
  auto same = [&](const std::string& name, D d) { f[name] = {d, d}; };

  same("name_exist", D::Constant(1));
  pair("name_length", D::LogNormal(11, 0.4), D::LogNormal(13, 0.4));
  pair("dist-tags_exist", D::Bernoulli(0.99), D::Bernoulli(0.97));
  pair("dist-tags_length", D::LogNormal(24, 0.25), D::LogNormal(20, 0.1));
  same("versions_exist", D::Constant(1));
  same("versions_length", D::Derived());
  pair("versions_num_count", D::LogNormal(8, 1.1), D::LogNormal(2, 0.9));
  pair("maintainers_exist", D::Bernoulli(0.97), D::Bernoulli(0.9));
  pair("description_exist", D::Bernoulli(0.9), D::Bernoulli(0.65));
  pair("description_length", D::LogNormal(45, 0.6), D::LogNormal(28, 0.8));
  pair("readme_exist", D::Bernoulli(0.88), D::Bernoulli(0.5));
  pair("readme_length", D::LogNormal(2200, 1.0), D::LogNormal(300, 1.3));
  pair("scripts_exist", D::Bernoulli(0.6), D::Bernoulli(0.75));
  pair("scripts_length", D::LogNormal(80, 0.6), D::LogNormal(55, 0.5));
  pair("author_exist", D::Bernoulli(0.85), D::Bernoulli(0.35));
  pair("author_name", D::Bernoulli(0.95), D::Bernoulli(0.75));
  pair("author_email", D::Bernoulli(0.6), D::Bernoulli(0.45));
  pair("License_exist", D::Bernoulli(0.9), D::Bernoulli(0.6));
  same("License_length", D::Derived());
  pair("directories_exist", D::Bernoulli(0.15), D::Bernoulli(0.05));
  pair("directories_length", D::LogNormal(30, 0.4), D::LogNormal(25, 0.3));
  pair("keywords_exist", D::Bernoulli(0.7), D::Bernoulli(0.3));
  same("keywords_length", D::Derived());
  pair("keywords_num_count", D::LogNormal(5, 0.6), D::LogNormal(2, 0.6));
  pair("homepage_exist", D::Bernoulli(0.8), D::Bernoulli(0.3));
  pair("homepage_length", D::LogNormal(45, 0.25), D::LogNormal(38, 0.3));
  pair("github_exist", D::Bernoulli(0.8), D::Bernoulli(0.3));
  pair("github_length", D::LogNormal(40, 0.2), D::LogNormal(36, 0.2));
  pair("bugslink_exist", D::Bernoulli(0.78), D::Bernoulli(0.25));
  pair("bugslink_length", D::LogNormal(47, 0.2), D::LogNormal(43, 0.2));
  pair("issueslink_exist", D::Bernoulli(0.05), D::Bernoulli(0.02));
  pair("issueslink_length", D::LogNormal(47, 0.2), D::LogNormal(43, 0.2));
  pair("dependencies_exist", D::Bernoulli(0.6), D::Bernoulli(0.4));
  pair("dependencies_length", D::LogNormal(120, 1.0), D::LogNormal(40, 0.8));
  pair("devDependencies_exist", D::Bernoulli(0.5), D::Bernoulli(0.1));
  pair("devDependencies_length", D::LogNormal(200, 1.0), D::LogNormal(60, 0.8));

  pair("package_age", D::LogNormal(1100, 0.9), D::LogNormal(600, 1.0));
  pair("package_modified_duration", D::LogNormal(600, 1.0, 0.02), D::LogNormal(3, 1.5, 0.5));
  pair("package_published_duration", D::LogNormal(2, 1.0, 0.9), D::LogNormal(1, 0.5, 0.97));
  pair("author_CPN", D::LogNormal(6, 1.1), D::LogNormal(3, 1.0));
  pair("author_service_time", D::LogNormal(400, 1.0, 0.05), D::LogNormal(5, 1.0, 0.6));
  same("author_CCS", D::Derived());
  pair("maintainer_CPN", D::LogNormal(7, 1.1), D::LogNormal(3, 1.0));
  pair("maintainer_service_time", D::LogNormal(350, 1.0, 0.05), D::LogNormal(5, 1.0, 0.6));
  same("maintainer_CCS", D::Derived());
  pair("contributor_CPN", D::LogNormal(4, 1.0, 0.6), D::LogNormal(1.5, 0.5, 0.95));
  pair("contributor_service_time", D::LogNormal(300, 1.0, 0.05), D::LogNormal(5, 1.0, 0.6));
  same("contributor_CCS", D::Derived());
  pair("publisher_CPN", D::LogNormal(8, 1.1, 0.02), D::LogNormal(3, 1.0, 0.02));
  pair("publisher_service_time", D::LogNormal(450, 1.0, 0.05), D::LogNormal(5, 1.0, 0.6));
  same("publisher_CCS", D::Derived());
  pair("pull_request", D::LogNormal(2, 1.5, 0.5), D::LogNormal(1, 0.5, 0.95));
  pair("issues", D::LogNormal(5, 1.8, 0.3), D::LogNormal(1, 0.8, 0.9));
  pair("fork_number", D::LogNormal(8, 2.0, 0.25), D::LogNormal(1, 1.0, 0.85));
  pair("star", D::LogNormal(30, 2.0, 0.2), D::LogNormal(2, 1.5, 0.6));
  pair("subscriber_count", D::LogNormal(5, 1.5, 0.2), D::LogNormal(1, 0.8, 0.8));
  return p;
}

namespace {

void CheckDistribution(const std::string& name, const char* side, const Distribution& d, ValueKind kind) {
  auto bad = [&](const std::string& why) {
    throw Error(ErrorCode::kBadProfile, name + " (" + side + "): " + why);
  };
  if (!std::isfinite(d.a) || !std::isfinite(d.b) || !std::isfinite(d.p_zero)) bad("non-finite parameter");
  if (d.p_zero < 0.0 || d.p_zero > 1.0) bad("p_zero outside [0,1]");
  const bool derived = DerivedFeatures().count(name) > 0;
  if (derived != (d.kind == D::Kind::kDerived)) bad(derived ? "must be derived" : "cannot be derived");
  if (AlwaysPresent().count(name) && !(d.kind == D::Kind::kConstant && d.a == 1.0)) bad("must be constant 1");
  switch (d.kind) {
    case D::Kind::kConstant:
      if (d.a < 0.0) bad("negative constant");
      if (kind == ValueKind::kBinary && d.a != 0.0 && d.a != 1.0) bad("binary constant must be 0 or 1");
      break;
    case D::Kind::kBernoulli:
      if (d.a < 0.0 || d.a > 1.0) bad("probability outside [0,1]");
      if (kind != ValueKind::kBinary) bad("Bernoulli on a non-binary feature");
      break;
    case D::Kind::kLogNormal:
      if (d.a <= 0.0 || d.b < 0.0) bad("log-normal needs median > 0 and sigma >= 0");
      if (kind == ValueKind::kBinary) bad("log-normal on a binary feature");
      break;
    case D::Kind::kUniform:
      if (d.a < 0.0 || d.b < d.a) bad("uniform needs 0 <= lo <= hi");
      if (kind == ValueKind::kBinary) bad("uniform on a binary feature");
      break;
    case D::Kind::kDerived: break;
  }
}

}  // namespace

void ValidateSynthSpec(const SynthSpec& spec) {
  if (spec.n_malicious == 0 || spec.n_benign == 0) {
    throw Error(ErrorCode::kBadProfile, "n_malicious and n_benign must be positive");
  }
  const auto& cat = Catalog();
  for (const auto& [name, pair] : spec.profile.features) {
    if (!cat.Find(name)) throw Error(ErrorCode::kBadProfile, "profile names unknown feature '" + name + "'");
  }
  for (const auto& fd : cat) {
    auto it = spec.profile.features.find(fd.name);
    if (it == spec.profile.features.end()) {
      throw Error(ErrorCode::kBadProfile, "profile has no distribution for '" + fd.name + "'");
    }
    CheckDistribution(fd.name, "benign", it->second.benign, fd.value_kind);
    CheckDistribution(fd.name, "malicious", it->second.malicious, fd.value_kind);
  }
  for (double rho : {spec.profile.popularity_rho_benign, spec.profile.popularity_rho_malicious}) {
    if (!(rho >= 0.0 && rho <= 1.0)) throw Error(ErrorCode::kBadProfile, "popularity correlation outside [0,1]");
  }
}

namespace {

constexpr std::string_view kLetters = "abcdefghijklmnopqrstuvwxyz";
const std::vector<std::string> kWords = {"fast",   "simple", "tiny",   "http",  "client", "server", "parse",
                                         "json",   "utils",  "string", "async", "stream", "react",  "node",
                                         "config", "logger", "test",   "build", "plugin", "color",  "data",
                                         "cli",    "date",   "time",   "path",  "file",   "cache",  "events"};
const std::vector<std::string> kLicenses = {"MIT", "ISC", "Apache-2.0", "BSD-3-Clause", "BSD-2-Clause", "GPL-3.0"};

std::string Base36(std::size_t v) {
  std::string s;
  do {
    s.insert(s.begin(), "0123456789abcdefghijklmnopqrstuvwxyz"[v % 36]);
    v /= 36;
  } while (v > 0);
  return s;
}

std::string Letters(Rng& rng, std::size_t n) {
  std::string s;
  for (std::size_t i = 0; i < n; ++i) s += kLetters[rng.Index(kLetters.size())];
  return s;
}

const std::string& Word(Rng& rng) { return kWords[rng.Index(kWords.size())]; }

std::size_t Round(double v, std::size_t min_value = 0) {
  return std::max(min_value, static_cast<std::size_t>(std::llround(std::max(0.0, v))));
}

// Prose of exactly `n` characters.
std::string Text(Rng& rng, std::size_t n) {
  std::string s;
  while (s.size() < n) {
    if (!s.empty()) s += ' ';
    s += Word(rng);
  }
  s.resize(n);
  return s;
}

// URL with `prefix` padded by letters to about `n` characters.
std::string Url(Rng& rng, const std::string& prefix, std::size_t n) {
  return prefix + Letters(rng, n > prefix.size() ? n - prefix.size() : 1);
}

std::size_t MapLength(const StringMap& m) { return Utf8Length(json(m).dump()); }

// Adds entries from `make` until the JSON form reaches `target` characters.
template <typename Make>
StringMap FillMap(std::size_t target, Make make) {
  StringMap m;
  for (int guard = 0; guard < 200; ++guard) {
    auto [k, v] = make(guard);
    m.emplace(std::move(k), std::move(v));
    if (MapLength(m) >= target) break;
  }
  return m;
}

std::string Semver(Rng& rng, int& major, int& minor, int& patch) {
  const double u = rng.Uniform();
  if (u < 0.05) {
    ++major;
    minor = patch = 0;
  } else if (u < 0.3) {
    ++minor;
    patch = 0;
  } else {
    ++patch;
  }
  return std::to_string(major) + "." + std::to_string(minor) + "." + std::to_string(patch);
}

struct Generator {
  const SynthSpec& spec;
  int label;
  std::size_t index;
  Rng rng;
  PackageMetadata p;

  const Distribution& Dist(const std::string& name) const { return spec.profile.features.at(name).For(label); }
  double S(const std::string& name) { return Dist(name).Sample(rng); }
  bool B(const std::string& name) { return S(name) >= 0.5; }

  Timestamp Day(Timestamp base_day, std::int64_t days, std::int64_t minutes) const {
    return AddDays(base_day, days) + std::chrono::minutes(minutes);
  }

  void Run();
};

void Generator::Run() {
  const std::string tag = Base36(index);
  const std::size_t name_len = Round(S("name_length"), tag.size() + 2);
  p.package_name = Letters(rng, name_len - tag.size() - 1) + "-" + tag;

  // Timeline. Everything happens at a fixed time of day before the noon
  // reference so that day offsets are exact calendar-day differences.
  const auto ref_day = std::chrono::floor<std::chrono::days>(spec.reference_time);
  const Timestamp ref_midnight = std::chrono::time_point_cast<std::chrono::milliseconds>(ref_day);
  const std::int64_t age = static_cast<std::int64_t>(Round(S("package_age")));
  const std::int64_t t0 = static_cast<std::int64_t>(rng.Index(6 * 60));  // minutes after midnight
  const Timestamp created_day = AddDays(ref_midnight, -age);
  p.created_time = created_day + std::chrono::minutes(t0) + std::chrono::milliseconds(rng.Index(1000));
  const std::int64_t modified = std::min<std::int64_t>(age, static_cast<std::int64_t>(Round(S("package_modified_duration"))));
  const std::int64_t first_pub =
      std::min<std::int64_t>(modified, static_cast<std::int64_t>(Round(S("package_published_duration"))));

  const std::size_t n_versions = std::min<std::size_t>(240, Round(S("versions_num_count"), 1));
  std::vector<std::int64_t> pub_days = {first_pub};
  for (std::size_t i = 1; i < n_versions; ++i) {
    pub_days.push_back(first_pub + static_cast<std::int64_t>(rng.Index(static_cast<std::size_t>(modified - first_pub + 1))));
  }
  std::sort(pub_days.begin(), pub_days.end());
  int major = 0, minor = 0, patch = 0;
  if (rng.Bernoulli(0.5)) major = 1;
  std::string latest;
  for (std::size_t i = 0; i < n_versions; ++i) {
    latest = Semver(rng, major, minor, patch);
    p.published_times[latest] = Day(created_day, pub_days[i], t0 + 1 + static_cast<std::int64_t>(i));
  }
  p.version = latest;
  p.modified_time = Day(created_day, modified, t0 + 1 + static_cast<std::int64_t>(n_versions));
  p.npm_link = "https://www.npmjs.com/package/" + p.package_name;

  if (B("dist-tags_exist")) {
    const std::size_t target = Round(S("dist-tags_length"));
    const char* extra_tags[] = {"next", "beta", "canary", "legacy", "alpha", "rc"};
    StringMap tags = {{"latest", latest}};
    for (const char* t : extra_tags) {
      if (MapLength(tags) >= target) break;
      tags[t] = latest;
    }
    p.distribution_tags = tags;
  }
  if (B("description_exist")) p.description = Text(rng, Round(S("description_length"), 1));
  if (B("readme_exist")) p.readme = Text(rng, Round(S("readme_length"), 1));
  if (B("scripts_exist")) {
    const char* keys[] = {"test", "postinstall", "build", "start", "lint", "preinstall", "prepare"};
    p.scripts = FillMap(Round(S("scripts_length")), [&](int i) {
      std::string k = i < 7 ? keys[i] : "task" + std::to_string(i);
      return std::pair{k, "node " + Word(rng) + ".js"};
    });
  }
  if (B("License_exist")) p.licenses = kLicenses[rng.Index(kLicenses.size())];
  if (B("directories_exist")) {
    p.directories = FillMap(Round(S("directories_length")), [&](int i) {
      std::string k = i == 0 ? "lib" : i == 1 ? "test" : Word(rng) + std::to_string(i);
      return std::pair{k, k};
    });
  }
  if (B("keywords_exist")) {
    const std::size_t n = Round(S("keywords_num_count"), 1);
    for (std::size_t i = 0; i < n; ++i) p.keywords.push_back(Word(rng));
  }
  const std::string owner = Letters(rng, 3 + rng.Index(6));
  if (B("github_exist")) p.github_link = Url(rng, "https://github.com/" + owner + "/", Round(S("github_length")));
  if (B("homepage_exist")) p.homepage_link = Url(rng, "https://" + owner + ".dev/", Round(S("homepage_length")));
  if (B("bugslink_exist")) p.bugs_link = Url(rng, "https://bugs." + owner + ".dev/", Round(S("bugslink_length")));
  if (B("issueslink_exist")) {
    p.issues_link = Url(rng, "https://issues." + owner + ".dev/", Round(S("issueslink_length")));
  }
  auto deps = [&](const std::string& len_feature) {
    return FillMap(Round(S(len_feature)), [&](int i) {
      return std::pair{Word(rng) + "-" + Letters(rng, 3) + std::to_string(i),
                       "^" + std::to_string(rng.Index(10)) + "." + std::to_string(rng.Index(20)) + ".0"};
    });
  };
  if (B("dependencies_exist")) p.dependencies = deps("dependencies_length");
  if (B("devDependencies_exist")) p.development_dependencies = deps("devDependencies_length");

  // Stakeholders, one distinct person per role.
  auto add_person = [&](Role role, bool has_name, bool has_email, std::size_t cpn) {
    const std::string who = std::string(RoleName(role)) + "-" + tag + "-" + Letters(rng, 4);
    Person person;
    if (has_name) person.name = who;
    if (has_email) person.email = who + "@example.org";
    const std::int64_t tenure = static_cast<std::int64_t>(Round(S(std::string(RoleName(role)) + "_service_time")));
    StakeholderRecord rec{role, AddDays(p.created_time, -tenure), static_cast<std::int64_t>(std::max<std::size_t>(1, cpn))};
    p.stakeholder_history[PersonId(person)] = rec;
    switch (role) {
      case Role::kAuthor: p.authors.push_back(person); break;
      case Role::kMaintainer: p.maintainers.push_back(person); break;
      case Role::kContributor: p.contributors.push_back(person); break;
      case Role::kPublisher: p.publishers.push_back(person); break;
    }
  };
  if (B("author_exist")) {
    bool has_name = B("author_name");
    const bool has_email = B("author_email");
    if (!has_name && !has_email) has_name = true;
    add_person(Role::kAuthor, has_name, has_email, Round(S("author_CPN"), 1));
  }
  if (B("maintainers_exist")) add_person(Role::kMaintainer, true, true, Round(S("maintainer_CPN"), 1));
  for (Role role : {Role::kContributor, Role::kPublisher}) {
    const std::size_t cpn = Round(S(std::string(RoleName(role)) + "_CPN"));
    if (cpn > 0) add_person(role, true, true, cpn);
  }

  // Interactions exist only for packages linked to a repository.
  if (p.github_link) {
    const double z = rng.Normal();
    const double rho = label == 1 ? spec.profile.popularity_rho_malicious : spec.profile.popularity_rho_benign;
    auto draw = [&](const char* name) {
      return static_cast<std::int64_t>(Round(Dist(name).Sample(rng, &z, rho)));
    };
    p.interactions.pull_request = draw("pull_request");
    p.interactions.issues = draw("issues");
    p.interactions.fork_number = draw("fork_number");
    p.interactions.star = draw("star");
    p.interactions.subscriber_count = draw("subscriber_count");
  }
}

}  // namespace

std::vector<LabeledPMI> Synthesize(const SynthSpec& spec) {
  ValidateSynthSpec(spec);
  const std::size_t n = spec.n_malicious + spec.n_benign;
  std::vector<LabeledPMI> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const int label = i < spec.n_malicious ? 1 : 0;
    Generator g{spec, label, i, Rng(DeriveSeed(spec.seed, static_cast<std::uint64_t>(i))), {}};
    g.Run();
    out.push_back({std::move(g.p), label});
  }
  Rng order(DeriveSeed(spec.seed, "synth-order"));
  order.Shuffle(out);
  return out;
}

namespace {

std::string_view KindName(D::Kind k) {
  switch (k) {
    case D::Kind::kConstant: return "constant";
    case D::Kind::kBernoulli: return "bernoulli";
    case D::Kind::kLogNormal: return "lognormal";
    case D::Kind::kUniform: return "uniform";
    case D::Kind::kDerived: return "derived";
  }
  return "constant";
}

json DistToJson(const Distribution& d) {
  json j = {{"kind", KindName(d.kind)}};
  switch (d.kind) {
    case D::Kind::kConstant: j["value"] = d.a; break;
    case D::Kind::kBernoulli: j["p"] = d.a; break;
    case D::Kind::kLogNormal: j["median"] = d.a; j["sigma"] = d.b; j["p_zero"] = d.p_zero; break;
    case D::Kind::kUniform: j["low"] = d.a; j["high"] = d.b; j["p_zero"] = d.p_zero; break;
    case D::Kind::kDerived: break;
  }
  return j;
}

Distribution DistFromJson(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "constant") return D::Constant(j.at("value").get<double>());
  if (kind == "bernoulli") return D::Bernoulli(j.at("p").get<double>());
  if (kind == "lognormal") {
    return D::LogNormal(j.at("median").get<double>(), j.at("sigma").get<double>(), j.value("p_zero", 0.0));
  }
  if (kind == "uniform") return D::Uniform(j.at("low").get<double>(), j.at("high").get<double>(), j.value("p_zero", 0.0));
  if (kind == "derived") return D::Derived();
  throw Error(ErrorCode::kBadProfile, "unknown distribution kind '" + kind + "'");
}

}  // namespace

json ProfileToJson(const SignalProfile& profile) {
  json features = json::object();
  for (const auto& [name, pair] : profile.features) {
    features[name] = {{"benign", DistToJson(pair.benign)}, {"malicious", DistToJson(pair.malicious)}};
  }
  return {{"features", features},
          {"popularity_rho_benign", profile.popularity_rho_benign},
          {"popularity_rho_malicious", profile.popularity_rho_malicious}};
}

SignalProfile ProfileFromJson(const json& j) {
  SignalProfile p = DefaultProfile();
  try {
    if (!j.is_object()) throw Error(ErrorCode::kBadProfile, "profile must be a JSON object");
    p.popularity_rho_benign = j.value("popularity_rho_benign", p.popularity_rho_benign);
    p.popularity_rho_malicious = j.value("popularity_rho_malicious", p.popularity_rho_malicious);
    if (j.contains("features")) {
      for (const auto& [name, entry] : j.at("features").items()) {
        if (!Catalog().Find(name)) throw Error(ErrorCode::kBadProfile, "profile names unknown feature '" + name + "'");
        auto& pair = p.features[name];
        if (entry.contains("benign")) pair.benign = DistFromJson(entry.at("benign"));
        if (entry.contains("malicious")) pair.malicious = DistFromJson(entry.at("malicious"));
      }
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kBadProfile, e.what());
  }
  return p;
}

}  // namespace memptec
