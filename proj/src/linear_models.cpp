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

#include <cmath>
#include <limits>
#include <numeric>

#include "memptec/util.hpp"
#include "model_internal.hpp"

namespace memptec::detail {

double LinearScore(const LinearParams& p, std::span<const double> x) {
  double s = p.bias;
  for (std::size_t j = 0; j < x.size(); ++j) s += p.weights[j] * x[j];
  return s;
}

namespace {

double MeanLogLoss(const LinearParams& p, const Dense& d) {
  double loss = 0.0;
  for (std::size_t i = 0; i < d.rows; ++i) loss += LogLoss(LinearScore(p, d.Row(i)), d.y[i]);
  return loss / static_cast<double>(d.rows);
}

// Platt scaling: fits sigmoid(a * s + b) to labels with smoothed targets by
// damped Newton steps.
std::pair<double, double> FitPlatt(const std::vector<double>& scores, const std::vector<int>& y) {
  double n_pos = 0;
  double n_neg = 0;
  for (int label : y) (label == 1 ? n_pos : n_neg) += 1;
  const double hi = (n_pos + 1.0) / (n_pos + 2.0);
  const double lo = 1.0 / (n_neg + 2.0);
  auto objective = [&](double a, double b) {
    double f = 0.0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
      const double z = a * scores[i] + b;
      const double t = y[i] == 1 ? hi : lo;
      f += Softplus(z) - t * z;
    }
    return f;
  };
  double a = 1.0;
  double b = 0.0;
  double f = objective(a, b);
  for (int iter = 0; iter < 100; ++iter) {
    double ga = 0, gb = 0, haa = 1e-12, hab = 0, hbb = 1e-12;
    for (std::size_t i = 0; i < scores.size(); ++i) {
      const double p = Sigmoid(a * scores[i] + b);
      const double t = y[i] == 1 ? hi : lo;
      const double w = p * (1.0 - p);
      ga += (p - t) * scores[i];
      gb += p - t;
      haa += w * scores[i] * scores[i];
      hab += w * scores[i];
      hbb += w;
    }
    if (std::abs(ga) < 1e-9 && std::abs(gb) < 1e-9) break;
    const double det = haa * hbb - hab * hab;
    const double da = -(hbb * ga - hab * gb) / det;
    const double db = -(-hab * ga + haa * gb) / det;
    double step = 1.0;
    bool improved = false;
    while (step > 1e-10) {
      const double fa = objective(a + step * da, b + step * db);
      if (fa < f) {
        a += step * da;
        b += step * db;
        f = fa;
        improved = true;
        break;
      }
      step /= 2;
    }
    if (!improved) break;
  }
  return {a, b};
}

}  // namespace

LinearParams TrainGlm(const Hyperparams& hp, const Dense& train, const Dense& valid) {
  const double l2 = hp.at("l2");
  const double lr = hp.at("learning_rate");
  const int epochs = static_cast<int>(hp.at("epochs"));
  const int patience = static_cast<int>(hp.at("patience"));
  const std::size_t n = train.rows;
  const std::size_t f = train.cols;

  LinearParams p;
  p.weights.assign(f, 0.0);
  LinearParams best = p;
  double best_loss = std::numeric_limits<double>::infinity();
  int stale = 0;
  std::vector<double> grad(f);
  for (int epoch = 0; epoch < epochs; ++epoch) {
    std::fill(grad.begin(), grad.end(), 0.0);
    double grad_b = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const auto x = train.Row(i);
      const double r = Sigmoid(LinearScore(p, x)) - train.y[i];
      for (std::size_t j = 0; j < f; ++j) grad[j] += r * x[j];
      grad_b += r;
    }
    const double inv_n = 1.0 / static_cast<double>(n);
    for (std::size_t j = 0; j < f; ++j) p.weights[j] -= lr * (grad[j] * inv_n + l2 * p.weights[j]);
    p.bias -= lr * grad_b * inv_n;

    if (valid.rows > 0 && patience > 0) {
      const double loss = MeanLogLoss(p, valid);
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

// Pegasos on the hinge loss with the bias folded in as a constant feature.
// The returned weights average the iterates of the second half of training.
LinearParams TrainSvm(const Hyperparams& hp, const Dense& train, const Dense& valid, std::uint64_t seed) {
  const double c = hp.at("C");
  const int epochs = static_cast<int>(hp.at("epochs"));
  const std::size_t n = train.rows;
  const std::size_t f = train.cols;
  const double lambda = 1.0 / (c * static_cast<double>(n));

  std::vector<double> w(f + 1, 0.0);
  std::vector<double> avg(f + 1, 0.0);
  double averaged = 0.0;
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(DeriveSeed(seed, "svm"));
  std::uint64_t t = 0;
  const double radius = 1.0 / std::sqrt(lambda);
  for (int epoch = 0; epoch < epochs; ++epoch) {
    rng.Shuffle(order);
    for (std::size_t i : order) {
      ++t;
      const double eta = 1.0 / (lambda * static_cast<double>(t));
      const auto x = train.Row(i);
      const double y = train.y[i] == 1 ? 1.0 : -1.0;
      double score = w[f];
      for (std::size_t j = 0; j < f; ++j) score += w[j] * x[j];
      const double shrink = 1.0 - eta * lambda;
      for (double& v : w) v *= shrink;
      if (y * score < 1.0) {
        for (std::size_t j = 0; j < f; ++j) w[j] += eta * y * x[j];
        w[f] += eta * y;
      }
      double norm2 = 0.0;
      for (double v : w) norm2 += v * v;
      if (norm2 > radius * radius) {
        const double s = radius / std::sqrt(norm2);
        for (double& v : w) v *= s;
      }
      if (epoch >= epochs / 2) {
        averaged += 1.0;
        for (std::size_t j = 0; j <= f; ++j) avg[j] += (w[j] - avg[j]) / averaged;
      }
    }
  }

  LinearParams p;
  p.weights.assign(avg.begin(), avg.begin() + static_cast<std::ptrdiff_t>(f));
  p.bias = avg[f];
  const Dense& calib = valid.rows > 0 ? valid : train;
  std::vector<double> scores(calib.rows);
  for (std::size_t i = 0; i < calib.rows; ++i) scores[i] = LinearScore(p, calib.Row(i));
  std::tie(p.scale, p.offset) = FitPlatt(scores, calib.y);
  return p;
}

}  // namespace memptec::detail
