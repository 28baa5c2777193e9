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

#include <algorithm>
#include <cmath>
#include <set>

#include "memptec/error.hpp"
#include "memptec/models.hpp"
#include "memptec/util.hpp"
#include "model_internal.hpp"

namespace memptec {

using nlohmann::json;

std::string_view AlgorithmName(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::kGlm: return "glm";
    case Algorithm::kSvm: return "svm";
    case Algorithm::kGbm: return "gbm";
    case Algorithm::kDrf: return "drf";
    case Algorithm::kMlp: return "mlp";
  }
  return "glm";
}

Algorithm ParseAlgorithm(std::string_view name) {
  for (Algorithm a : AllAlgorithms()) {
    if (AlgorithmName(a) == name) return a;
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown algorithm '" + std::string(name) + "'");
}

const std::vector<Algorithm>& AllAlgorithms() {
  static const std::vector<Algorithm> all = {Algorithm::kGlm, Algorithm::kSvm, Algorithm::kGbm, Algorithm::kDrf,
                                             Algorithm::kMlp};
  return all;
}

Hyperparams DefaultHyperparams(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::kGlm: return {{"l2", 1e-3}, {"learning_rate", 0.1}, {"epochs", 500}, {"patience", 20}};
    case Algorithm::kSvm: return {{"C", 1.0}, {"epochs", 50}};
    case Algorithm::kGbm:
      return {{"n_trees", 100}, {"max_depth", 3}, {"learning_rate", 0.1}, {"lambda", 1.0}, {"min_child_weight", 1.0}};
    case Algorithm::kDrf: return {{"n_trees", 100}, {"max_depth", 12}, {"min_samples_leaf", 1}, {"mtry", 0}};
    case Algorithm::kMlp:
      return {{"hidden1", 64}, {"hidden2", 32},  {"learning_rate", 1e-3},
              {"batch_size", 32}, {"epochs", 200}, {"patience", 10}};
  }
  return {};
}

namespace {

Hyperparams Resolve(Algorithm algorithm, const Hyperparams& overrides) {
  Hyperparams hp = DefaultHyperparams(algorithm);
  const std::string algo(AlgorithmName(algorithm));
  for (const auto& [k, v] : overrides) {
    if (!hp.count(k)) throw Error(ErrorCode::kBadHyperparam, algo + " has no hyperparameter '" + k + "'");
    hp[k] = v;
  }
  static const std::set<std::string> integral = {"epochs", "patience", "n_trees", "max_depth", "min_samples_leaf",
                                                 "mtry", "hidden1", "hidden2", "batch_size"};
  static const std::set<std::string> may_be_zero = {"l2", "patience", "lambda", "min_child_weight", "mtry"};
  for (const auto& [k, v] : hp) {
    const bool ok = std::isfinite(v) && (v > 0 || (v == 0 && may_be_zero.count(k))) &&
                    (!integral.count(k) || v == std::floor(v));
    if (!ok) throw Error(ErrorCode::kBadHyperparam, algo + "." + k + " = " + std::to_string(v) + " is invalid");
  }
  return hp;
}

void CheckFinite(const FeatureMatrix& m, const char* which) {
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (!std::isfinite(m.At(i, j))) {
        throw Error(ErrorCode::kNonFiniteFeature, std::string(which) + " row " + std::to_string(i) + " feature '" +
                                                      m.catalog()[j].name + "'");
      }
    }
  }
}

Standardization FitStandardization(const FeatureMatrix& train, bool enabled) {
  Standardization s;
  s.enabled = enabled;
  if (!enabled) return s;
  const std::size_t n = train.rows();
  const std::size_t f = train.cols();
  s.mean.assign(f, 0.0);
  s.stddev.assign(f, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < f; ++j) s.mean[j] += train.At(i, j);
  }
  for (double& m : s.mean) m /= static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < f; ++j) {
      const double d = train.At(i, j) - s.mean[j];
      s.stddev[j] += d * d;
    }
  }
  for (double& sd : s.stddev) {
    sd = std::sqrt(sd / static_cast<double>(n));
    if (!(sd > 0.0)) sd = 1.0;
  }
  return s;
}

void Apply(const Standardization& s, std::span<const double> in, double* out) {
  for (std::size_t j = 0; j < in.size(); ++j) out[j] = s.enabled ? (in[j] - s.mean[j]) / s.stddev[j] : in[j];
}

detail::Dense ToDense(const FeatureMatrix& m, const Standardization& s) {
  detail::Dense d;
  d.rows = m.rows();
  d.cols = m.cols();
  d.x.resize(d.rows * d.cols);
  d.y = m.labels();
  for (std::size_t i = 0; i < d.rows; ++i) Apply(s, m.Row(i), d.x.data() + i * d.cols);
  return d;
}

}  // namespace

double Tree::Predict(std::span<const double> x) const {
  std::size_t i = 0;
  while (nodes[i].feature >= 0) {
    const TreeNode& n = nodes[i];
    i = static_cast<std::size_t>(x[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right);
  }
  return nodes[i].value;
}

double TrainedModel::PredictRow(std::span<const double> raw) const {
  std::vector<double> x(raw.size());
  Apply(standardization, raw, x.data());
  if (const auto* lin = std::get_if<LinearParams>(&params)) {
    return detail::Sigmoid(lin->scale * detail::LinearScore(*lin, x) + lin->offset);
  }
  if (const auto* ens = std::get_if<TreeEnsemble>(&params)) {
    double sum = 0.0;
    for (const auto& t : ens->trees) sum += t.Predict(x);
    if (ens->boosted) return detail::Sigmoid(ens->base_score + ens->learning_rate * sum);
    return ens->trees.empty() ? 0.5 : sum / static_cast<double>(ens->trees.size());
  }
  return detail::Sigmoid(detail::MlpLogit(std::get<MlpParams>(params), x));
}

TrainedModel Train(const TrainConfig& cfg, const FeatureMatrix& train, const FeatureMatrix& valid) {
  const Hyperparams hp = Resolve(cfg.algorithm, cfg.hyperparams);
  if (train.empty()) throw Error(ErrorCode::kSingleClassTraining, "training set is empty");
  const auto& y = train.labels();
  const bool has_pos = std::find(y.begin(), y.end(), 1) != y.end();
  const bool has_neg = std::find(y.begin(), y.end(), 0) != y.end();
  if (!has_pos || !has_neg) {
    throw Error(ErrorCode::kSingleClassTraining, "training labels contain a single class");
  }
  if (!valid.empty() && !(valid.catalog() == train.catalog())) {
    throw Error(ErrorCode::kCatalogMismatch, "validation catalog differs from training catalog");
  }
  CheckFinite(train, "train");
  CheckFinite(valid, "valid");

  TrainedModel m;
  m.algorithm = cfg.algorithm;
  m.hyperparams = hp;
  m.catalog_fingerprint = train.catalog().Fingerprint();
  m.feature_names = train.catalog().Names();
  const bool linear_like = cfg.algorithm == Algorithm::kGlm || cfg.algorithm == Algorithm::kSvm ||
                           cfg.algorithm == Algorithm::kMlp;
  m.standardization = FitStandardization(train, cfg.standardize.value_or(linear_like));
  const detail::Dense tr = ToDense(train, m.standardization);
  const detail::Dense va = ToDense(valid, m.standardization);

  switch (cfg.algorithm) {
    case Algorithm::kGlm: m.params = detail::TrainGlm(hp, tr, va); break;
    case Algorithm::kSvm: m.params = detail::TrainSvm(hp, tr, va, cfg.seed); break;
    case Algorithm::kGbm: m.params = detail::TrainGbm(hp, tr); break;
    case Algorithm::kDrf: m.params = detail::TrainDrf(hp, tr, cfg.seed, cfg.jobs); break;
    case Algorithm::kMlp: m.params = detail::TrainMlp(hp, tr, va, cfg.seed); break;
  }
  return m;
}

std::vector<double> PredictProba(const TrainedModel& model, const FeatureMatrix& x) {
  if (x.catalog().Fingerprint() != model.catalog_fingerprint) {
    throw Error(ErrorCode::kCatalogMismatch, "matrix catalog " + HexU64(x.catalog().Fingerprint()) +
                                                 " does not match model catalog " + HexU64(model.catalog_fingerprint));
  }
  std::vector<double> out(x.rows());
  for (std::size_t i = 0; i < x.rows(); ++i) out[i] = model.PredictRow(x.Row(i));
  return out;
}

std::vector<int> PredictLabel(const TrainedModel& model, const FeatureMatrix& x, double threshold) {
  if (!(threshold > 0.0 && threshold < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "threshold must lie in (0,1)");
  }
  const auto p = PredictProba(model, x);
  std::vector<int> out(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) out[i] = p[i] >= threshold ? 1 : 0;
  return out;
}

namespace {

constexpr int kFormatVersion = 1;

json TreeToJson(const Tree& t) {
  json nodes = json::array();
  for (const auto& n : t.nodes) {
    if (n.feature < 0) {
      nodes.push_back({{"value", n.value}});
    } else {
      nodes.push_back({{"feature", n.feature}, {"threshold", n.threshold}, {"left", n.left}, {"right", n.right}});
    }
  }
  return nodes;
}

Tree TreeFromJson(const json& j) {
  Tree t;
  for (const auto& n : j) {
    TreeNode node;
    if (n.contains("feature")) {
      node.feature = n.at("feature").get<int>();
      node.threshold = n.at("threshold").get<double>();
      node.left = n.at("left").get<int>();
      node.right = n.at("right").get<int>();
    } else {
      node.value = n.at("value").get<double>();
    }
    t.nodes.push_back(node);
  }
  return t;
}

json ParamsToJson(const ModelParams& params) {
  if (const auto* lin = std::get_if<LinearParams>(&params)) {
    return {{"weights", lin->weights}, {"bias", lin->bias}, {"scale", lin->scale}, {"offset", lin->offset}};
  }
  if (const auto* ens = std::get_if<TreeEnsemble>(&params)) {
    json trees = json::array();
    for (const auto& t : ens->trees) trees.push_back(TreeToJson(t));
    return {{"boosted", ens->boosted},           {"base_score", ens->base_score},
            {"learning_rate", ens->learning_rate}, {"train_loss", ens->train_loss},
            {"oob_accuracy", ens->oob_accuracy}, {"trees", trees}};
  }
  const auto& mlp = std::get<MlpParams>(params);
  return {{"layers", mlp.layers}, {"weights", mlp.weights}, {"biases", mlp.biases}};
}

ModelParams ParamsFromJson(Algorithm algorithm, const json& j) {
  switch (algorithm) {
    case Algorithm::kGlm:
    case Algorithm::kSvm: {
      LinearParams p;
      p.weights = j.at("weights").get<std::vector<double>>();
      p.bias = j.at("bias").get<double>();
      p.scale = j.at("scale").get<double>();
      p.offset = j.at("offset").get<double>();
      return p;
    }
    case Algorithm::kGbm:
    case Algorithm::kDrf: {
      TreeEnsemble e;
      e.boosted = j.at("boosted").get<bool>();
      e.base_score = j.at("base_score").get<double>();
      e.learning_rate = j.at("learning_rate").get<double>();
      e.train_loss = j.at("train_loss").get<std::vector<double>>();
      e.oob_accuracy = j.at("oob_accuracy").get<double>();
      for (const auto& t : j.at("trees")) e.trees.push_back(TreeFromJson(t));
      return e;
    }
    case Algorithm::kMlp: {
      MlpParams p;
      p.layers = j.at("layers").get<std::vector<std::size_t>>();
      p.weights = j.at("weights").get<std::vector<std::vector<double>>>();
      p.biases = j.at("biases").get<std::vector<std::vector<double>>>();
      return p;
    }
  }
  return LinearParams{};
}

}  // namespace

json ModelToJson(const TrainedModel& model) {
  json hp = json::object();
  for (const auto& [k, v] : model.hyperparams) hp[k] = v;
  return {{"format_version", kFormatVersion},
          {"algorithm", AlgorithmName(model.algorithm)},
          {"hyperparams", hp},
          {"catalog_fingerprint", HexU64(model.catalog_fingerprint)},
          {"feature_names", model.feature_names},
          {"standardization",
           {{"enabled", model.standardization.enabled},
            {"mean", model.standardization.mean},
            {"stddev", model.standardization.stddev}}},
          {"parameters", ParamsToJson(model.params)}};
}

TrainedModel ModelFromJson(const json& j) {
  try {
    if (j.at("format_version").get<int>() != kFormatVersion) {
      throw Error(ErrorCode::kMalformedDocument, "unsupported model format_version");
    }
    TrainedModel m;
    m.algorithm = ParseAlgorithm(j.at("algorithm").get<std::string>());
    for (const auto& [k, v] : j.at("hyperparams").items()) m.hyperparams[k] = v.get<double>();
    m.catalog_fingerprint = std::stoull(j.at("catalog_fingerprint").get<std::string>(), nullptr, 16);
    m.feature_names = j.at("feature_names").get<std::vector<std::string>>();
    const auto& s = j.at("standardization");
    m.standardization.enabled = s.at("enabled").get<bool>();
    m.standardization.mean = s.at("mean").get<std::vector<double>>();
    m.standardization.stddev = s.at("stddev").get<std::vector<double>>();
    m.params = ParamsFromJson(m.algorithm, j.at("parameters"));
    return m;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kMalformedDocument, std::string("model file: ") + e.what());
  }
}

}  // namespace memptec
