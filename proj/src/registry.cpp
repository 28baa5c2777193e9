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

#include "memptec/registry.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>
#include <thread>

#include "httplib.h"
#include "json.hpp"
#include "memptec/error.hpp"
#include "memptec/util.hpp"

namespace memptec {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

class HttplibTransport : public HttpTransport {
 public:
  explicit HttplibTransport(std::chrono::seconds timeout) : timeout_(timeout) {}

  HttpResponse Get(const std::string& url, const std::map<std::string, std::string>& headers) override {
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) throw Error(ErrorCode::kInvalidArgument, "bad url " + url);
    const auto path_start = url.find('/', scheme_end + 3);
    const std::string base = path_start == std::string::npos ? url : url.substr(0, path_start);
    const std::string path = path_start == std::string::npos ? "/" : url.substr(path_start);

    httplib::Client client(base);
    client.set_connection_timeout(timeout_);
    client.set_read_timeout(timeout_);
    client.set_follow_location(true);
    httplib::Headers request_headers;
    for (const auto& [k, v] : headers) request_headers.emplace(k, v);
    auto res = client.Get(path, request_headers);
    if (!res) {
      throw Error(ErrorCode::kNetworkUnavailable, "GET " + url + ": " + httplib::to_string(res.error()));
    }
    HttpResponse out;
    out.status = res->status;
    out.body = res->body;
    for (const auto& [k, v] : res->headers) out.headers[ToLowerAscii(k)] = v;
    return out;
  }

 private:
  std::chrono::seconds timeout_;
};

struct CacheMeta {
  std::string etag;
  std::string link;
  std::string fetch_time;
};

fs::path MetaPath(const fs::path& cache_file) {
  return fs::path(cache_file.string() + ".meta");
}

std::optional<CacheMeta> ReadMeta(const fs::path& cache_file) {
  std::error_code ec;
  if (!fs::exists(MetaPath(cache_file), ec)) return std::nullopt;
  json j = json::parse(ReadFile(MetaPath(cache_file)), nullptr, false);
  if (!j.is_object()) return std::nullopt;
  CacheMeta m;
  m.etag = j.value("etag", "");
  m.link = j.value("link", "");
  m.fetch_time = j.value("fetch_time", "");
  return m;
}

std::string HeaderOr(const HttpResponse& r, const std::string& key) {
  auto it = r.headers.find(key);
  return it == r.headers.end() ? std::string() : it->second;
}

Timestamp NowUtc() {
  return std::chrono::time_point_cast<std::chrono::milliseconds>(std::chrono::system_clock::now());
}

}  // namespace

std::shared_ptr<HttpTransport> MakeDefaultTransport(std::chrono::seconds timeout) {
  return std::make_shared<HttplibTransport>(timeout);
}

RateLimiter::RateLimiter(double requests_per_second)
    : interval_(std::chrono::duration_cast<std::chrono::steady_clock::duration>(
          std::chrono::duration<double>(1.0 / requests_per_second))) {
  if (!(requests_per_second > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "requests_per_second must be positive");
  }
}

void RateLimiter::Acquire() {
  std::chrono::steady_clock::time_point slot;
  {
    std::lock_guard<std::mutex> lock(mu_);
    const auto now = std::chrono::steady_clock::now();
    slot = std::max(now, next_);
    next_ = slot + interval_;
  }
  std::this_thread::sleep_until(slot);
}

RepoRef ParseRepoUrl(const std::string& raw) {
  std::string url = TrimAscii(raw);
  std::string lower = ToLowerAscii(url);
  std::string path;
  if (lower.rfind("github:", 0) == 0) {
    path = url.substr(7);
  } else {
    static const std::regex kHosted(R"(^(?:git\+)?(?:[a-z]+://)?(?:[^@/]+@)?([^/:]+)[/:](.*)$)",
                                    std::regex::icase);
    std::smatch m;
    if (!std::regex_match(url, m, kHosted)) {
      throw Error(ErrorCode::kUnsupportedHost, "cannot parse repository url '" + raw + "'");
    }
    std::string host = ToLowerAscii(m[1].str());
    if (host.rfind("www.", 0) == 0) host = host.substr(4);
    if (host != "github.com") throw Error(ErrorCode::kUnsupportedHost, "unsupported host '" + host + "'");
    path = m[2].str();
  }
  auto parts = SplitString(path, '/');
  if (parts.size() < 2 || parts[0].empty() || parts[1].empty()) {
    throw Error(ErrorCode::kUnsupportedHost, "repository url lacks owner/repo: '" + raw + "'");
  }
  RepoRef ref{parts[0], parts[1]};
  if (auto hash = ref.repo.find('#'); hash != std::string::npos) ref.repo.resize(hash);
  if (ref.repo.size() > 4 && ref.repo.ends_with(".git")) ref.repo.resize(ref.repo.size() - 4);
  return ref;
}

std::string UrlSafeName(const std::string& name) {
  std::string out;
  for (unsigned char c : name) {
    if (std::isalnum(c) || c == '.' || c == '_' || c == '-') {
      out.push_back(static_cast<char>(c));
    } else {
      char buf[4];
      std::snprintf(buf, sizeof(buf), "%%%02X", c);
      out += buf;
    }
  }
  return out;
}

RegistryClient::RegistryClient(CachePolicy policy, FetchBudget budget, std::shared_ptr<HttpTransport> transport,
                               Endpoints endpoints)
    : policy_(std::move(policy)),
      budget_(budget),
      transport_(std::move(transport)),
      endpoints_(std::move(endpoints)),
      limiter_(budget.requests_per_second) {
  if (budget_.max_concurrent < 1) throw Error(ErrorCode::kInvalidArgument, "max_concurrent must be >= 1");
  if (budget_.retries < 0) throw Error(ErrorCode::kInvalidArgument, "retries must be >= 0");
  if (const char* t = std::getenv("MEMPTEC_GITHUB_TOKEN"); t && *t) token_ = t;
}

fs::path RegistryClient::CachePath(const std::string& name) const {
  return policy_.cache_dir / (UrlSafeName(name) + ".json");
}

HttpResponse RegistryClient::GetWithRetries(const std::string& url, std::map<std::string, std::string> headers) {
  std::string last_error = "no attempt made";
  for (int attempt = 0; attempt <= budget_.retries; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(budget_.initial_backoff * (1LL << (attempt - 1)));
    }
    limiter_.Acquire();
    const int now_in_flight = ++in_flight_;
    int prev = max_in_flight_.load();
    while (now_in_flight > prev && !max_in_flight_.compare_exchange_weak(prev, now_in_flight)) {
    }
    ++network_calls_;
    try {
      HttpResponse r = transport_->Get(url, headers);
      --in_flight_;
      if (r.status == 429 || r.status >= 500) {
        last_error = "HTTP " + std::to_string(r.status);
        continue;
      }
      return r;
    } catch (const Error& e) {
      --in_flight_;
      if (e.code() != ErrorCode::kNetworkUnavailable) throw;
      last_error = e.what();
    }
  }
  throw Error(ErrorCode::kNetworkUnavailable,
              "GET " + url + " failed after " + std::to_string(budget_.retries + 1) + " attempts: " + last_error);
}

RegistryClient::Fetched RegistryClient::Retrieve(const std::string& url, const fs::path& cache_file,
                                                 bool authorized) {
  std::error_code ec;
  const bool cached = fs::exists(cache_file, ec);
  if (policy_.mode == CachePolicy::Mode::kOfflineOnly) {
    if (!cached) throw Error(ErrorCode::kNetworkUnavailable, "offline and not cached: " + url);
    return {ReadFile(cache_file), true};
  }
  if (policy_.mode == CachePolicy::Mode::kCacheFirst && cached) {
    const auto age = fs::file_time_type::clock::now() - fs::last_write_time(cache_file, ec);
    if (!ec && age < policy_.max_age) return {ReadFile(cache_file), true};
  }

  std::map<std::string, std::string> headers{{"Accept", "application/json"},
                                             {"User-Agent", "memptec/" MEMPTEC_VERSION}};
  const auto meta = cached ? ReadMeta(cache_file) : std::nullopt;
  if (meta && !meta->etag.empty()) headers["If-None-Match"] = meta->etag;
  if (authorized && token_) headers["Authorization"] = "Bearer " + *token_;

  HttpResponse r = GetWithRetries(url, headers);
  if (r.status == 304 && cached) {
    fs::last_write_time(cache_file, fs::file_time_type::clock::now(), ec);
    return {ReadFile(cache_file), true};
  }
  if (r.status == 404) throw Error(ErrorCode::kNotFound, url);
  if (r.status != 200) throw Error(ErrorCode::kNetworkUnavailable, "GET " + url + ": HTTP " + std::to_string(r.status));

  fs::create_directories(cache_file.parent_path(), ec);
  WriteFileAtomic(cache_file, r.body);
  json m{{"etag", HeaderOr(r, "etag")}, {"link", HeaderOr(r, "link")}, {"fetch_time", FormatTimestamp(NowUtc())}};
  WriteFileAtomic(MetaPath(cache_file), m.dump());
  return {r.body, false};
}

PackageMetadata RegistryClient::FetchPackage(const std::string& name) {
  if (name.empty()) throw Error(ErrorCode::kInvalidArgument, "package name is empty");
  // Scoped names keep '@' but escape the '/' in the registry path.
  std::string encoded;
  for (char c : name) {
    if (c == '/') {
      encoded += "%2F";
    } else {
      encoded.push_back(c);
    }
  }
  const fs::path cache_file = CachePath(name);
  Fetched fetched = Retrieve(endpoints_.registry_base + "/" + encoded, cache_file, false);
  PackageMetadata pmi = ParsePmi(fetched.body);
  if (auto meta = ReadMeta(cache_file); meta && !meta->fetch_time.empty()) {
    pmi.fetch_time = ParseTimestamp(meta->fetch_time);
  }
  return pmi;
}

std::vector<RegistryClient::Result> RegistryClient::FetchPackages(const std::vector<std::string>& names) {
  std::vector<Result> results(names.size());
  ParallelFor(names.size(), budget_.max_concurrent, [&](std::size_t i) {
    results[i].name = names[i];
    try {
      results[i].metadata = FetchPackage(names[i]);
    } catch (const Error& e) {
      results[i].error = e.what();
    }
  });
  return results;
}

InteractionCounts RegistryClient::FetchRepoInteractions(const std::string& repo_url,
                                                        std::vector<std::string>* warnings) {
  const RepoRef ref = ParseRepoUrl(repo_url);
  const fs::path dir = policy_.cache_dir / "repos";
  const std::string stem = UrlSafeName(ref.owner) + "__" + UrlSafeName(ref.repo);
  const std::string api = endpoints_.repo_api_base + "/repos/" + ref.owner + "/" + ref.repo;

  auto warn = [&](const std::string& w) {
    if (warnings) warnings->push_back(w);
  };

  Fetched repo = Retrieve(api, dir / (stem + ".json"), true);
  json body = json::parse(repo.body, nullptr, false);
  if (!body.is_object()) throw Error(ErrorCode::kMalformedDocument, "repository response is not an object");

  auto count = [&](const char* key, const char* field) -> std::int64_t {
    auto it = body.find(key);
    if (it == body.end() || !it->is_number()) {
      warn(std::string(field) + " unavailable from " + api + "; using 0");
      return 0;
    }
    return it->get<std::int64_t>();
  };
  InteractionCounts c;
  c.star = count("stargazers_count", "star");
  c.fork_number = count("forks_count", "fork_number");
  c.subscriber_count = count("subscribers_count", "subscriber_count");
  c.issues = count("open_issues_count", "issues");

  // Open pull requests: with per_page=1 the rel="last" page number is the count.
  const fs::path pulls_file = dir / (stem + "__pulls.json");
  try {
    Fetched pulls = Retrieve(api + "/pulls?state=open&per_page=1", pulls_file, true);
    const auto meta = ReadMeta(pulls_file);
    static const std::regex kLast(R"([?&]page=(\d+)[^>]*>;\s*rel="last")");
    std::smatch m;
    if (meta && std::regex_search(meta->link, m, kLast)) {
      c.pull_request = std::stoll(m[1].str());
    } else {
      json arr = json::parse(pulls.body, nullptr, false);
      c.pull_request = arr.is_array() ? static_cast<std::int64_t>(arr.size()) : 0;
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kNetworkUnavailable && policy_.mode == CachePolicy::Mode::kOfflineOnly) throw;
    warn(std::string("pull_request unavailable: ") + e.what() + "; using 0");
  }
  return c;
}

std::map<std::string, StakeholderRecord> BuildStakeholderHistory(const std::vector<PackageMetadata>& corpus) {
  struct Acc {
    StakeholderRecord record;
    std::set<std::string> packages;
  };
  std::map<std::string, Acc> acc;
  constexpr Role kRoles[] = {Role::kAuthor, Role::kMaintainer, Role::kContributor, Role::kPublisher};
  for (const auto& pkg : corpus) {
    for (Role role : kRoles) {
      for (const auto& person : pkg.Stakeholders(role)) {
        if (!person.name && !person.email) continue;
        const std::string id = PersonId(person);
        auto [it, inserted] = acc.try_emplace(id);
        Acc& a = it->second;
        if (inserted) {
          a.record.role = role;
          a.record.first_seen = pkg.created_time;
        } else if (pkg.created_time < a.record.first_seen) {
          a.record.first_seen = pkg.created_time;
        }
        a.packages.insert(pkg.package_name);
      }
    }
  }
  std::map<std::string, StakeholderRecord> out;
  for (auto& [id, a] : acc) {
    a.record.contributed_package_count = static_cast<std::int64_t>(a.packages.size());
    out.emplace(id, a.record);
  }
  return out;
}

void AttachStakeholderHistory(std::vector<PackageMetadata>& corpus,
                              const std::map<std::string, StakeholderRecord>& history) {
  constexpr Role kRoles[] = {Role::kAuthor, Role::kMaintainer, Role::kContributor, Role::kPublisher};
  for (auto& pkg : corpus) {
    for (Role role : kRoles) {
      for (const auto& person : pkg.Stakeholders(role)) {
        const std::string id = PersonId(person);
        if (auto it = history.find(id); it != history.end()) pkg.stakeholder_history[id] = it->second;
      }
    }
  }
}

std::vector<LabeledPMI> ParseCorpus(std::string_view jsonl) {
  std::vector<LabeledPMI> out;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= jsonl.size()) {
    std::size_t end = jsonl.find('\n', start);
    if (end == std::string_view::npos) end = jsonl.size();
    const std::string line = TrimAscii(jsonl.substr(start, end - start));
    ++line_no;
    start = end + 1;
    if (line.empty() || line.front() == '#') {
      if (end == jsonl.size()) break;
      continue;
    }
    const std::string where = "line " + std::to_string(line_no);
    json j = json::parse(line, nullptr, false);
    if (!j.is_object() || !j.contains("package")) {
      throw Error(ErrorCode::kMalformedDocument, where + ": expected {\"package\": ..., \"label\": ...}");
    }
    auto label = j.find("label");
    if (label == j.end() || !label->is_number_integer() || (label->get<int>() != 0 && label->get<int>() != 1)) {
      throw Error(ErrorCode::kBadLabel, where + ": label must be 0 or 1");
    }
    LabeledPMI rec;
    try {
      rec.metadata = ParsePmiJson(j["package"]);
    } catch (const Error& e) {
      throw Error(ErrorCode::kMalformedDocument, where + ": " + e.what());
    }
    rec.label = label->get<int>();
    out.push_back(std::move(rec));
    if (end == jsonl.size()) break;
  }
  return out;
}

std::vector<LabeledPMI> LoadFixtureCorpus(const fs::path& path) {
  return ParseCorpus(ReadFile(path));
}

std::string CorpusToJsonl(const std::vector<LabeledPMI>& corpus) {
  std::string out;
  for (const auto& rec : corpus) {
    json line{{"package", SerializePmi(rec.metadata)}, {"label", rec.label}};
    out += line.dump();
    out += '\n';
  }
  return out;
}

void WriteCorpus(const fs::path& path, const std::vector<LabeledPMI>& corpus) {
  WriteFileAtomic(path, CorpusToJsonl(corpus));
}

void WriteFileAtomic(const fs::path& path, std::string_view content) {
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  static std::atomic<std::uint64_t> counter{0};
  const fs::path tmp = fs::path(path.string() + ".tmp." +
                                std::to_string(std::hash<std::thread::id>{}(std::this_thread::get_id())) + "." +
                                std::to_string(counter++));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::kIo, "cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw Error(ErrorCode::kIo, "short write to " + tmp.string());
  }
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error(ErrorCode::kIo, "cannot rename into " + path.string());
  }
}

std::string ReadFile(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace memptec
