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

#include "memptec/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "memptec/error.hpp"
#include "memptec/util.hpp"

namespace memptec {

Ratio ParseRatio(std::string_view text) {
  if (text == "balanced" || text == "balanced_1_1" || text == "1:1") return Ratio::kBalanced1To1;
  if (text == "imbalanced" || text == "imbalanced_1_10" || text == "1:10") return Ratio::kImbalanced1To10;
  throw Error(ErrorCode::kInvalidArgument, "unknown ratio '" + std::string(text) + "'");
}

std::string_view RatioName(Ratio ratio) {
  return ratio == Ratio::kBalanced1To1 ? "balanced" : "imbalanced";
}

std::vector<LabeledPMI> Assemble(const std::vector<PackageMetadata>& malicious,
                                 const std::vector<PackageMetadata>& benign, Ratio ratio, std::uint64_t seed) {
  const std::size_t factor = ratio == Ratio::kBalanced1To1 ? 1 : 10;
  const std::size_t needed = malicious.size() * factor;
  if (benign.size() < needed) {
    throw Error(ErrorCode::kInsufficientBenign, "need " + std::to_string(needed) + " benign packages, have " +
                                                    std::to_string(benign.size()));
  }
  Rng rng(DeriveSeed(seed, "assemble"));
  std::vector<std::size_t> pick(benign.size());
  std::iota(pick.begin(), pick.end(), 0);
  rng.Shuffle(pick);
  pick.resize(needed);

  std::vector<LabeledPMI> out;
  out.reserve(malicious.size() + needed);
  for (const auto& m : malicious) out.push_back({m, 1});
  for (std::size_t i : pick) out.push_back({benign[i], 0});
  rng.Shuffle(out);
  return out;
}

namespace {

void CheckSpec(const SplitSpec& spec) {
  const double sum = spec.train_frac + spec.valid_frac + spec.test_frac;
  if (std::abs(sum - 1.0) > 1e-9 || spec.train_frac <= 0.0 || spec.valid_frac < 0.0 || spec.test_frac <= 0.0) {
    throw Error(ErrorCode::kInvalidArgument, "split fractions must be positive and sum to 1");
  }
}

// Positive-class count per partition. Each count stays within one row of
// n_pos * frac, and so does the implied negative count totals[p] - count.
// Both windows are at least a row wide and their sums bracket n_pos, so a
// solution always exists; the greedy fill keeps the largest shortfalls first.
std::vector<std::size_t> StratifiedCounts(std::size_t n_pos, std::size_t n, const std::vector<std::size_t>& totals,
                                          const std::vector<double>& fracs) {
  constexpr double kEps = 1e-9;
  const std::size_t parts = totals.size();
  std::vector<double> target(parts);
  std::vector<std::size_t> lo(parts), hi(parts), out(parts);
  std::size_t assigned = 0;
  for (std::size_t p = 0; p < parts; ++p) {
    const double q_pos = static_cast<double>(n_pos) * fracs[p];
    const double q_neg = static_cast<double>(n - n_pos) * fracs[p];
    const double total = static_cast<double>(totals[p]);
    const double l = std::max({q_pos - 1.0, total - q_neg - 1.0, 0.0});
    const double h = std::min({q_pos + 1.0, total - q_neg + 1.0, total});
    lo[p] = static_cast<std::size_t>(std::ceil(l - kEps));
    hi[p] = static_cast<std::size_t>(std::floor(h + kEps));
    target[p] = q_pos;
    out[p] = lo[p];
    assigned += lo[p];
  }
  while (assigned < n_pos) {
    std::size_t best = parts;
    for (std::size_t p = 0; p < parts; ++p) {
      if (out[p] >= hi[p]) continue;
      if (best == parts || target[p] - static_cast<double>(out[p]) > target[best] - static_cast<double>(out[best])) {
        best = p;
      }
    }
    if (best == parts) throw Error(ErrorCode::kInvalidArgument, "cannot stratify split");
    ++out[best];
    ++assigned;
  }
  if (assigned != n_pos) throw Error(ErrorCode::kInvalidArgument, "cannot stratify split");
  return out;
}

}  // namespace

SplitIndices Split(std::span<const int> labels, const SplitSpec& spec) {
  CheckSpec(spec);
  const std::size_t n = labels.size();
  if (n < 10) throw Error(ErrorCode::kTooSmall, "need at least 10 rows to split, have " + std::to_string(n));

  const auto n_train = static_cast<std::size_t>(std::llround(static_cast<double>(n) * spec.train_frac));
  const auto n_valid = static_cast<std::size_t>(std::llround(static_cast<double>(n) * spec.valid_frac));

  // One group per class when stratified, otherwise a single group.
  std::vector<std::vector<std::size_t>> groups(spec.stratified ? 2 : 1);
  for (std::size_t i = 0; i < n; ++i) groups[spec.stratified ? (labels[i] == 1 ? 1 : 0) : 0].push_back(i);

  Rng rng(DeriveSeed(spec.seed, "split"));
  for (auto& g : groups) rng.Shuffle(g);

  const std::vector<std::size_t> totals = {n_train, n_valid, n - n_train - n_valid};
  // counts[g] = {train, valid} rows taken from group g.
  std::vector<std::vector<std::size_t>> counts;
  if (spec.stratified) {
    const auto pos = StratifiedCounts(groups[1].size(), n, totals, {spec.train_frac, spec.valid_frac, spec.test_frac});
    counts = {{totals[0] - pos[0], totals[1] - pos[1]}, {pos[0], pos[1]}};
  } else {
    counts = {{totals[0], totals[1]}};
  }

  SplitIndices out;
  out.seed = spec.seed;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const auto& idx = groups[g];
    const std::size_t a = counts[g][0];
    const std::size_t b = a + counts[g][1];
    out.train.insert(out.train.end(), idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(a));
    out.valid.insert(out.valid.end(), idx.begin() + static_cast<std::ptrdiff_t>(a),
                     idx.begin() + static_cast<std::ptrdiff_t>(b));
    out.test.insert(out.test.end(), idx.begin() + static_cast<std::ptrdiff_t>(b), idx.end());
  }
  std::sort(out.train.begin(), out.train.end());
  std::sort(out.valid.begin(), out.valid.end());
  std::sort(out.test.begin(), out.test.end());
  return out;
}

std::vector<SplitIndices> RepeatedSplits(std::span<const int> labels, int k, std::uint64_t master_seed,
                                         SplitSpec base) {
  if (k < 2) throw Error(ErrorCode::kInvalidArgument, "repeated splits need k >= 2");
  std::vector<SplitIndices> out;
  for (int i = 0; i < k; ++i) {
    base.seed = master_seed + static_cast<std::uint64_t>(i);
    out.push_back(Split(labels, base));
  }
  return out;
}

std::vector<SplitIndices> KFoldSplits(std::span<const int> labels, int k, std::uint64_t seed, SplitSpec base) {
  CheckSpec(base);
  if (k < 2) throw Error(ErrorCode::kInvalidArgument, "k-fold needs k >= 2");
  const std::size_t n = labels.size();
  if (n < 10 || n < static_cast<std::size_t>(k)) throw Error(ErrorCode::kTooSmall, "too few rows for k-fold");

  std::vector<std::vector<std::size_t>> classes(2);
  for (std::size_t i = 0; i < n; ++i) classes[labels[i] == 1 ? 1 : 0].push_back(i);
  Rng rng(DeriveSeed(seed, "kfold"));
  std::vector<int> fold_of(n, 0);
  int next = 0;
  for (auto& c : classes) {
    rng.Shuffle(c);
    for (std::size_t i : c) fold_of[i] = next++ % k;
  }

  const double valid_share = base.valid_frac / (base.train_frac + base.valid_frac);
  std::vector<SplitIndices> out;
  for (int f = 0; f < k; ++f) {
    SplitIndices s;
    s.seed = seed + static_cast<std::uint64_t>(f);
    std::vector<std::vector<std::size_t>> rest(2);
    for (std::size_t i = 0; i < n; ++i) {
      if (fold_of[i] == f) {
        s.test.push_back(i);
      } else {
        rest[labels[i] == 1 ? 1 : 0].push_back(i);
      }
    }
    Rng fold_rng(DeriveSeed(s.seed, "kfold-valid"));
    for (auto& r : rest) {
      fold_rng.Shuffle(r);
      const auto nv = static_cast<std::size_t>(std::llround(static_cast<double>(r.size()) * valid_share));
      s.valid.insert(s.valid.end(), r.begin(), r.begin() + static_cast<std::ptrdiff_t>(nv));
      s.train.insert(s.train.end(), r.begin() + static_cast<std::ptrdiff_t>(nv), r.end());
    }
    std::sort(s.train.begin(), s.train.end());
    std::sort(s.valid.begin(), s.valid.end());
    out.push_back(std::move(s));
  }
  return out;
}

nlohmann::json ToJson(const SplitIndices& s) {
  return {{"seed", s.seed}, {"train_idx", s.train}, {"valid_idx", s.valid}, {"test_idx", s.test}};
}

SplitIndices SplitIndicesFromJson(const nlohmann::json& j) {
  SplitIndices s;
  s.seed = j.at("seed").get<std::uint64_t>();
  s.train = j.at("train_idx").get<std::vector<std::size_t>>();
  s.valid = j.at("valid_idx").get<std::vector<std::size_t>>();
  s.test = j.at("test_idx").get<std::vector<std::size_t>>();
  return s;
}

}  // namespace memptec
