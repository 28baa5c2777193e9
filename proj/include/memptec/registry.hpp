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

// Registry ingestion: package documents over HTTP with an on-disk cache,
// repository interaction counts, cross-package stakeholder aggregation and
// JSON Lines corpora.

#include <atomic>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "memptec/pmi.hpp"

namespace memptec {

struct CachePolicy {
  enum class Mode { kOfflineOnly, kCacheFirst, kRefresh };

  Mode mode = Mode::kCacheFirst;
  std::filesystem::path cache_dir = ".memptec-cache";
  std::chrono::seconds max_age{std::chrono::hours{24}};
};

struct FetchBudget {
  int max_concurrent = 4;
  double requests_per_second = 2.0;
  int retries = 3;
  std::chrono::milliseconds initial_backoff{500};
};

struct HttpResponse {
  int status = 0;
  std::string body;
  std::map<std::string, std::string> headers;  // keys lowercased
};

// Blocking GET. Implementations throw Error(kNetworkUnavailable) when no
// response could be obtained at all.
class HttpTransport {
 public:
  virtual ~HttpTransport() = default;
  virtual HttpResponse Get(const std::string& url, const std::map<std::string, std::string>& headers) = 0;
};

// cpp-httplib backed transport (HTTP and HTTPS).
std::shared_ptr<HttpTransport> MakeDefaultTransport(std::chrono::seconds timeout = std::chrono::seconds{30});

// Spaces request starts at least 1/rps apart. Thread-safe.
class RateLimiter {
 public:
  explicit RateLimiter(double requests_per_second);
  void Acquire();

 private:
  std::mutex mu_;
  std::chrono::steady_clock::duration interval_;
  std::chrono::steady_clock::time_point next_{};
};

struct Endpoints {
  std::string registry_base = "https://registry.npmjs.org";
  std::string repo_api_base = "https://api.github.com";
};

struct RepoRef {
  std::string owner;
  std::string repo;
};

// Extracts owner/repo from the URL shapes found in package manifests
// (git+https://, git://, git@host:, github:owner/repo). Throws
// kUnsupportedHost for anything other than github.com.
RepoRef ParseRepoUrl(const std::string& url);

// "@scope/name" -> "%40scope%2Fname"; used for cache file names.
std::string UrlSafeName(const std::string& name);

class RegistryClient {
 public:
  RegistryClient(CachePolicy policy, FetchBudget budget,
                 std::shared_ptr<HttpTransport> transport = MakeDefaultTransport(),
                 Endpoints endpoints = {});

  // Errors: kNotFound, kNetworkUnavailable, kMalformedDocument.
  PackageMetadata FetchPackage(const std::string& name);

  struct Result {
    std::string name;
    std::optional<PackageMetadata> metadata;
    std::string error;  // empty on success
  };
  // Fetches concurrently, at most budget.max_concurrent in flight. Output
  // order follows `names`.
  std::vector<Result> FetchPackages(const std::vector<std::string>& names);

  // Counts the hosting API cannot supply are reported as 0 and noted in
  // `warnings`. Errors: kUnsupportedHost, kNetworkUnavailable.
  InteractionCounts FetchRepoInteractions(const std::string& repo_url,
                                          std::vector<std::string>* warnings = nullptr);

  std::filesystem::path CachePath(const std::string& name) const;

  std::uint64_t network_calls() const { return network_calls_.load(); }
  int max_in_flight() const { return max_in_flight_.load(); }

 private:
  struct Fetched {
    std::string body;
    bool from_cache = false;
  };
  // Cache-aware retrieval of one URL into `cache_file`.
  Fetched Retrieve(const std::string& url, const std::filesystem::path& cache_file, bool authorized);
  HttpResponse GetWithRetries(const std::string& url, std::map<std::string, std::string> headers);

  CachePolicy policy_;
  FetchBudget budget_;
  std::shared_ptr<HttpTransport> transport_;
  Endpoints endpoints_;
  RateLimiter limiter_;
  std::optional<std::string> token_;
  std::atomic<std::uint64_t> network_calls_{0};
  std::atomic<int> in_flight_{0};
  std::atomic<int> max_in_flight_{0};
};

// Aggregates stakeholders over a corpus. Person id = PersonId(); CPN = number
// of distinct packages listing the person in any role; first_seen = earliest
// created_time among those packages; role = first role the person is seen in.
std::map<std::string, StakeholderRecord> BuildStakeholderHistory(const std::vector<PackageMetadata>& corpus);

// Copies the relevant entries of `history` into each package's
// stakeholder_history.
void AttachStakeholderHistory(std::vector<PackageMetadata>& corpus,
                              const std::map<std::string, StakeholderRecord>& history);

// JSON Lines: one {"package": <document>, "label": 0|1} per line. Blank lines
// and '#' comment lines are skipped. Errors: kBadLabel, kMalformedDocument (both name the line).
std::vector<LabeledPMI> LoadFixtureCorpus(const std::filesystem::path& path);
std::vector<LabeledPMI> ParseCorpus(std::string_view jsonl);
void WriteCorpus(const std::filesystem::path& path, const std::vector<LabeledPMI>& corpus);
std::string CorpusToJsonl(const std::vector<LabeledPMI>& corpus);

// Writes `content` to a sibling temp file then renames it into place.
void WriteFileAtomic(const std::filesystem::path& path, std::string_view content);
std::string ReadFile(const std::filesystem::path& path);

}  // namespace memptec
