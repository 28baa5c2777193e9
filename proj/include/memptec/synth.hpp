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

// Seeded generator of labeled package metadata with a controllable
// benign/malicious signal per catalog feature.
//
// Each feature has a (benign, malicious) distribution pair. A few features
// are read with a twist so that the generated records stay coherent:
//   - *_exist is the presence probability of the underlying field; lengths,
//     counts and sub-field flags (author_name, author_email) apply only when
//     the field is present.
//   - <role>_service_time is the stakeholder's tenure before the package was
//     created, so the extracted service time is package_age + tenure.
//   - contributor_CPN and publisher_CPN draw 0 when the role is absent.
//   - interaction counts require a github link and share a latent popularity
//     factor (correlation per class) when they are log-normal.
//   - kDerived marks features computed from others (CCS, list lengths).

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "memptec/pmi.hpp"
#include "memptec/timestamp.hpp"
#include "memptec/util.hpp"

namespace memptec {

struct Distribution {
  enum class Kind { kConstant, kBernoulli, kLogNormal, kUniform, kDerived };
  Kind kind = Kind::kConstant;
  double a = 0.0;       // constant value, Bernoulli p, log-normal median, uniform low
  double b = 0.0;       // log-normal sigma, uniform high
  double p_zero = 0.0;  // extra mass at 0

  static Distribution Constant(double v) { return {Kind::kConstant, v, 0.0, 0.0}; }
  static Distribution Bernoulli(double p) { return {Kind::kBernoulli, p, 0.0, 0.0}; }
  static Distribution LogNormal(double median, double sigma, double p_zero = 0.0) {
    return {Kind::kLogNormal, median, sigma, p_zero};
  }
  static Distribution Uniform(double lo, double hi, double p_zero = 0.0) { return {Kind::kUniform, lo, hi, p_zero}; }
  static Distribution Derived() { return {Kind::kDerived, 0.0, 0.0, 0.0}; }

  // `z` is an optional shared standard-normal draw used by log-normals.
  double Sample(Rng& rng, const double* z = nullptr, double rho = 0.0) const;

  bool operator==(const Distribution&) const = default;
};

struct DistributionPair {
  Distribution benign;
  Distribution malicious;

  const Distribution& For(int label) const { return label == 1 ? malicious : benign; }
  bool operator==(const DistributionPair&) const = default;
};

struct SignalProfile {
  std::map<std::string, DistributionPair> features;
  // Correlation of the interaction counts through the latent popularity.
  double popularity_rho_benign = 0.8;
  double popularity_rho_malicious = 0.5;

  bool operator==(const SignalProfile&) const = default;
};

// Malicious packages skew toward missing author/homepage, short readme,
// young age, fresh stakeholder accounts and low interaction counts.
SignalProfile DefaultProfile();

struct SynthSpec {
  std::size_t n_malicious = 3232;
  std::size_t n_benign = 3232;
  SignalProfile profile = DefaultProfile();
  std::uint64_t seed = 0;
  Timestamp reference_time = *ParseTimestamp("2023-06-01T12:00:00Z");
};

// Throws kBadProfile on a missing or unknown feature, an out-of-domain
// parameter, a non-binary distribution on a binary feature, or a kDerived
// entry on a sampled feature. Zero counts also raise kBadProfile.
void ValidateSynthSpec(const SynthSpec& spec);

// Records in seeded shuffled order. Deterministic per spec.
std::vector<LabeledPMI> Synthesize(const SynthSpec& spec);

nlohmann::json ProfileToJson(const SignalProfile& profile);
// Throws kBadProfile on malformed input. Entries absent from `j` keep the
// default profile's values.
SignalProfile ProfileFromJson(const nlohmann::json& j);

}  // namespace memptec
