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

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "memptec/models.hpp"

namespace memptec::detail {

// Row-major design matrix after standardization.
struct Dense {
  std::vector<double> x;
  std::vector<int> y;
  std::size_t rows = 0;
  std::size_t cols = 0;

  std::span<const double> Row(std::size_t i) const { return {x.data() + i * cols, cols}; }
};

inline double Sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// log(1 + exp(z)) without overflow.
inline double Softplus(double z) { return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

// Log loss of a logit against a binary label.
inline double LogLoss(double z, int y) { return Softplus(z) - (y == 1 ? z : 0.0); }

double LinearScore(const LinearParams& p, std::span<const double> x);
double MlpLogit(const MlpParams& p, std::span<const double> x);

LinearParams TrainGlm(const Hyperparams& hp, const Dense& train, const Dense& valid);
LinearParams TrainSvm(const Hyperparams& hp, const Dense& train, const Dense& valid, std::uint64_t seed);
TreeEnsemble TrainGbm(const Hyperparams& hp, const Dense& train);
TreeEnsemble TrainDrf(const Hyperparams& hp, const Dense& train, std::uint64_t seed, int jobs);
MlpParams TrainMlp(const Hyperparams& hp, const Dense& train, const Dense& valid, std::uint64_t seed);

}  // namespace memptec::detail
