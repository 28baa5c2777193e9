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

// Five binary classifiers behind one train/predict contract: logistic
// regression (glm), linear SVM (svm), gradient boosted trees (gbm), random
// forest (drf) and a multilayer perceptron (mlp).

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "json.hpp"
#include "memptec/features.hpp"

namespace memptec {

enum class Algorithm { kGlm, kSvm, kGbm, kDrf, kMlp };

std::string_view AlgorithmName(Algorithm algorithm);
// Throws kInvalidArgument.
Algorithm ParseAlgorithm(std::string_view name);
const std::vector<Algorithm>& AllAlgorithms();

using Hyperparams = std::map<std::string, double>;

// glm:  l2, learning_rate, epochs, patience
// svm:  C, epochs
// gbm:  n_trees, max_depth, learning_rate, lambda, min_child_weight
// drf:  n_trees, max_depth, min_samples_leaf, mtry (0 = ceil(sqrt(F)))
// mlp:  hidden1, hidden2, learning_rate, batch_size, epochs, patience
Hyperparams DefaultHyperparams(Algorithm algorithm);

struct TrainConfig {
  Algorithm algorithm = Algorithm::kGlm;
  Hyperparams hyperparams;  // overrides on top of the defaults
  std::uint64_t seed = 0;
  std::optional<bool> standardize;  // unset: on for glm/svm/mlp, off for trees
  int jobs = 1;                     // tree-level parallelism; results do not depend on it
};

struct Standardization {
  bool enabled = false;
  std::vector<double> mean;
  std::vector<double> stddev;  // 1 where the training column is constant

  bool operator==(const Standardization&) const = default;
};

struct LinearParams {
  std::vector<double> weights;
  double bias = 0.0;
  // Probability = sigmoid(scale * score + offset). Identity for glm; fitted
  // on validation scores for svm.
  double scale = 1.0;
  double offset = 0.0;

  bool operator==(const LinearParams&) const = default;
};

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;  // x <= threshold goes left
  int left = -1;
  int right = -1;
  double value = 0.0;  // leaf output

  bool operator==(const TreeNode&) const = default;
};

struct Tree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root

  double Predict(std::span<const double> x) const;
  bool operator==(const Tree&) const = default;
};

struct TreeEnsemble {
  std::vector<Tree> trees;
  // Boosted: proba = sigmoid(base_score + learning_rate * sum of tree outputs).
  // Forest: proba = mean of tree outputs.
  bool boosted = false;
  double base_score = 0.0;
  double learning_rate = 1.0;
  std::vector<double> train_loss;  // boosted: mean log loss after each round
  double oob_accuracy = 0.0;       // forest only

  bool operator==(const TreeEnsemble&) const = default;
};

struct MlpParams {
  std::vector<std::size_t> layers;          // input, hidden..., 1
  std::vector<std::vector<double>> weights;  // layer l: layers[l+1] x layers[l], row-major
  std::vector<std::vector<double>> biases;

  bool operator==(const MlpParams&) const = default;
};

using ModelParams = std::variant<LinearParams, TreeEnsemble, MlpParams>;

struct TrainedModel {
  Algorithm algorithm = Algorithm::kGlm;
  Hyperparams hyperparams;
  std::uint64_t catalog_fingerprint = 0;
  std::vector<std::string> feature_names;
  Standardization standardization;
  ModelParams params;

  // Probability of the malicious class for one raw (unstandardized) row.
  double PredictRow(std::span<const double> x) const;

  bool operator==(const TrainedModel&) const = default;
};

// Throws kSingleClassTraining, kNonFiniteFeature, kBadHyperparam, and
// kCatalogMismatch when train and valid catalogs differ. `valid` may be
// empty, which disables early stopping (svm then calibrates on train scores).
TrainedModel Train(const TrainConfig& cfg, const FeatureMatrix& train, const FeatureMatrix& valid);

// Throws kCatalogMismatch when the matrix catalog differs from training.
std::vector<double> PredictProba(const TrainedModel& model, const FeatureMatrix& x);
// Label 1 iff proba >= threshold. Threshold must lie in (0,1).
std::vector<int> PredictLabel(const TrainedModel& model, const FeatureMatrix& x, double threshold = 0.5);

nlohmann::json ModelToJson(const TrainedModel& model);
TrainedModel ModelFromJson(const nlohmann::json& j);

// MLP internals, exposed for gradient checking.
MlpParams InitMlp(const std::vector<std::size_t>& layers, std::uint64_t seed);
// Mean binary cross-entropy over the rows of `x` (row-major, layers[0]
// columns). Fills `grad` (same shape as params) when non-null.
double MlpLossAndGradient(const MlpParams& params, std::span<const double> x, std::span<const int> y,
                          MlpParams* grad);

}  // namespace memptec
