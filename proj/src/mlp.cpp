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
#include <limits>
#include <numeric>

#include "memptec/error.hpp"
#include "memptec/util.hpp"
#include "model_internal.hpp"

namespace memptec {

MlpParams InitMlp(const std::vector<std::size_t>& layers, std::uint64_t seed) {
  if (layers.size() < 2 || layers.back() != 1) {
    throw Error(ErrorCode::kBadHyperparam, "mlp layers must end in a single output unit");
  }
  MlpParams p;
  p.layers = layers;
  Rng rng(DeriveSeed(seed, "mlp-init"));
  for (std::size_t l = 0; l + 1 < layers.size(); ++l) {
    const double scale = std::sqrt(2.0 / static_cast<double>(layers[l]));  // He init for ReLU
    std::vector<double> w(layers[l + 1] * layers[l]);
    for (double& v : w) v = scale * rng.Normal();
    p.weights.push_back(std::move(w));
    p.biases.emplace_back(layers[l + 1], 0.0);
  }
  return p;
}

namespace {

MlpParams ZerosLike(const MlpParams& p) {
  MlpParams z;
  z.layers = p.layers;
  for (const auto& w : p.weights) z.weights.emplace_back(w.size(), 0.0);
  for (const auto& b : p.biases) z.biases.emplace_back(b.size(), 0.0);
  return z;
}

// Forward pass keeping every layer's activations. Hidden layers use ReLU; the
// last layer is the output logit.
struct Workspace {
  std::vector<std::vector<double>> act;    // act[0] = input
  std::vector<std::vector<double>> delta;  // gradient w.r.t. pre-activations

  explicit Workspace(const std::vector<std::size_t>& layers) {
    for (std::size_t width : layers) {
      act.emplace_back(width, 0.0);
      delta.emplace_back(width, 0.0);
    }
  }
};

double Forward(const MlpParams& p, std::span<const double> x, Workspace& ws) {
  std::copy(x.begin(), x.end(), ws.act[0].begin());
  const std::size_t last = p.weights.size() - 1;
  for (std::size_t l = 0; l <= last; ++l) {
    const std::size_t in = p.layers[l];
    const std::size_t out = p.layers[l + 1];
    const double* w = p.weights[l].data();
    const double* a = ws.act[l].data();
    double* z = ws.act[l + 1].data();
    for (std::size_t o = 0; o < out; ++o) {
      double s = p.biases[l][o];
      const double* row = w + o * in;
      for (std::size_t i = 0; i < in; ++i) s += row[i] * a[i];
      z[o] = l == last ? s : std::max(0.0, s);
    }
  }
  return ws.act.back()[0];
}

// Adds d(loss)/d(params) for one row, scaled by `weight`.
void Backward(const MlpParams& p, Workspace& ws, double dlogit, double weight, MlpParams& grad) {
  const std::size_t n_layers = p.weights.size();
  ws.delta[n_layers][0] = dlogit * weight;
  for (std::size_t l = n_layers; l-- > 0;) {
    const std::size_t in = p.layers[l];
    const std::size_t out = p.layers[l + 1];
    const double* a = ws.act[l].data();
    const double* d = ws.delta[l + 1].data();
    double* gw = grad.weights[l].data();
    for (std::size_t o = 0; o < out; ++o) {
      grad.biases[l][o] += d[o];
      double* row = gw + o * in;
      for (std::size_t i = 0; i < in; ++i) row[i] += d[o] * a[i];
    }
    if (l == 0) break;
    double* dprev = ws.delta[l].data();
    std::fill(dprev, dprev + in, 0.0);
    const double* w = p.weights[l].data();
    for (std::size_t o = 0; o < out; ++o) {
      const double* row = w + o * in;
      for (std::size_t i = 0; i < in; ++i) dprev[i] += d[o] * row[i];
    }
    for (std::size_t i = 0; i < in; ++i) {
      if (a[i] <= 0.0) dprev[i] = 0.0;  // ReLU gate
    }
  }
}

}  // namespace

double MlpLossAndGradient(const MlpParams& params, std::span<const double> x, std::span<const int> y,
                          MlpParams* grad) {
  const std::size_t f = params.layers[0];
  const std::size_t n = y.size();
  if (x.size() != n * f || n == 0) throw Error(ErrorCode::kLengthMismatch, "mlp input shape");
  Workspace ws(params.layers);
  if (grad) *grad = ZerosLike(params);
  double loss = 0.0;
  const double w = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double z = Forward(params, x.subspan(i * f, f), ws);
    loss += detail::LogLoss(z, y[i]);
    if (grad) Backward(params, ws, detail::Sigmoid(z) - y[i], w, *grad);
  }
  return loss * w;
}

namespace detail {

double MlpLogit(const MlpParams& p, std::span<const double> x) {
  Workspace ws(p.layers);
  return Forward(p, x, ws);
}

MlpParams TrainMlp(const Hyperparams& hp, const Dense& train, const Dense& valid, std::uint64_t seed) {
  const std::vector<std::size_t> layers = {train.cols, static_cast<std::size_t>(hp.at("hidden1")),
                                           static_cast<std::size_t>(hp.at("hidden2")), 1};
  const double lr = hp.at("learning_rate");
  const auto batch = static_cast<std::size_t>(hp.at("batch_size"));
  const int epochs = static_cast<int>(hp.at("epochs"));
  const int patience = static_cast<int>(hp.at("patience"));
  constexpr double kBeta1 = 0.9;
  constexpr double kBeta2 = 0.999;
  constexpr double kEps = 1e-8;

  MlpParams p = InitMlp(layers, seed);
  MlpParams m = ZerosLike(p);
  MlpParams v = ZerosLike(p);
  MlpParams g = ZerosLike(p);
  MlpParams best = p;
  double best_loss = std::numeric_limits<double>::infinity();
  int stale = 0;
  Workspace ws(layers);
  Rng rng(DeriveSeed(seed, "mlp-order"));
  std::vector<std::size_t> order(train.rows);
  std::iota(order.begin(), order.end(), 0);
  std::uint64_t step = 0;

  auto adam = [&](std::vector<double>& param, std::vector<double>& gr, std::vector<double>& mo,
                  std::vector<double>& ve, double c1, double c2) {
    for (std::size_t k = 0; k < param.size(); ++k) {
      mo[k] = kBeta1 * mo[k] + (1 - kBeta1) * gr[k];
      ve[k] = kBeta2 * ve[k] + (1 - kBeta2) * gr[k] * gr[k];
      param[k] -= lr * (mo[k] / c1) / (std::sqrt(ve[k] / c2) + kEps);
      gr[k] = 0.0;
    }
  };

  for (int epoch = 0; epoch < epochs; ++epoch) {
    rng.Shuffle(order);
    for (std::size_t start = 0; start < order.size(); start += batch) {
      const std::size_t end = std::min(order.size(), start + batch);
      const double w = 1.0 / static_cast<double>(end - start);
      for (std::size_t k = start; k < end; ++k) {
        const std::size_t i = order[k];
        const double z = Forward(p, train.Row(i), ws);
        Backward(p, ws, Sigmoid(z) - train.y[i], w, g);
      }
      ++step;
      const double c1 = 1.0 - std::pow(kBeta1, static_cast<double>(step));
      const double c2 = 1.0 - std::pow(kBeta2, static_cast<double>(step));
      for (std::size_t l = 0; l < p.weights.size(); ++l) {
        adam(p.weights[l], g.weights[l], m.weights[l], v.weights[l], c1, c2);
        adam(p.biases[l], g.biases[l], m.biases[l], v.biases[l], c1, c2);
      }
    }
    if (valid.rows > 0 && patience > 0) {
      const double loss = MlpLossAndGradient(p, valid.x, valid.y, nullptr);
      if (loss < best_loss) {
        best_loss = loss;
        best = p;
        stale = 0;
      } else if (++stale >= patience) {
        break;
      }
    }
  }
  return valid.rows > 0 && patience > 0 ? best : p;
}

}  // namespace detail
}  // namespace memptec
