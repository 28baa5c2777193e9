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
#include <numeric>

#include "memptec/util.hpp"
#include "model_internal.hpp"

namespace memptec::detail {

namespace {

// Split point strictly between two distinct sorted values.
double Midpoint(double lo, double hi) {
  const double mid = lo + (hi - lo) / 2.0;
  return mid < hi ? mid : lo;
}

struct LevelNode {
  int node = 0;  // index in the tree
  double g = 0.0;
  double h = 0.0;
};

struct Candidate {
  double gain = 0.0;
  int feature = -1;
  double threshold = 0.0;
};

Tree FitBoostedTree(const Dense& d, const std::vector<std::vector<std::uint32_t>>& sorted,
                    const std::vector<double>& g, const std::vector<double>& h, int max_depth, double lambda,
                    double min_child_weight) {
  Tree tree;
  tree.nodes.push_back({});
  const std::size_t n = d.rows;
  // Position of each row in the current level's node list, -1 once it sits in a leaf.
  std::vector<int> slot(n, 0);
  std::vector<LevelNode> level = {{0, 0.0, 0.0}};
  for (std::size_t i = 0; i < n; ++i) {
    level[0].g += g[i];
    level[0].h += h[i];
  }
  auto leaf_value = [&](const LevelNode& ln) { return -ln.g / (ln.h + lambda); };

  for (int depth = 0; depth < max_depth && !level.empty(); ++depth) {
    const std::size_t k = level.size();
    std::vector<Candidate> best(k);
    std::vector<double> gl(k), hl(k), prev(k);
    std::vector<char> seen(k);
    for (std::size_t j = 0; j < d.cols; ++j) {
      std::fill(gl.begin(), gl.end(), 0.0);
      std::fill(hl.begin(), hl.end(), 0.0);
      std::fill(seen.begin(), seen.end(), 0);
      for (std::uint32_t i : sorted[j]) {
        const int s = slot[i];
        if (s < 0) continue;
        const double v = d.x[i * d.cols + j];
        if (seen[s] && v > prev[s]) {
          const LevelNode& ln = level[s];
          const double gr = ln.g - gl[s];
          const double hr = ln.h - hl[s];
          if (hl[s] >= min_child_weight && hr >= min_child_weight) {
            const double gain = gl[s] * gl[s] / (hl[s] + lambda) + gr * gr / (hr + lambda) -
                                ln.g * ln.g / (ln.h + lambda);
            if (gain > best[s].gain) best[s] = {gain, static_cast<int>(j), Midpoint(prev[s], v)};
          }
        }
        seen[s] = 1;
        prev[s] = v;
        gl[s] += g[i];
        hl[s] += h[i];
      }
    }

    std::vector<LevelNode> next;
    std::vector<int> child_slot(2 * k, -1);
    for (std::size_t s = 0; s < k; ++s) {
      TreeNode& tn = tree.nodes[static_cast<std::size_t>(level[s].node)];
      if (best[s].feature < 0 || !(best[s].gain > 1e-12)) {
        tn.value = leaf_value(level[s]);
        continue;
      }
      tn.feature = best[s].feature;
      tn.threshold = best[s].threshold;
      tn.left = static_cast<int>(tree.nodes.size());
      tn.right = tn.left + 1;
      const int left = tn.left;  // tn is invalidated by push_back
      tree.nodes.push_back({});
      tree.nodes.push_back({});
      child_slot[2 * s] = static_cast<int>(next.size());
      next.push_back({left, 0.0, 0.0});
      child_slot[2 * s + 1] = static_cast<int>(next.size());
      next.push_back({left + 1, 0.0, 0.0});
    }
    for (std::size_t i = 0; i < n; ++i) {
      const int s = slot[i];
      if (s < 0) continue;
      const auto& tn = tree.nodes[static_cast<std::size_t>(level[static_cast<std::size_t>(s)].node)];
      if (tn.feature < 0) {
        slot[i] = -1;
        continue;
      }
      const bool go_left = d.x[i * d.cols + static_cast<std::size_t>(tn.feature)] <= tn.threshold;
      const int c = child_slot[2 * static_cast<std::size_t>(s) + (go_left ? 0 : 1)];
      slot[i] = c;
      next[static_cast<std::size_t>(c)].g += g[i];
      next[static_cast<std::size_t>(c)].h += h[i];
    }
    level = std::move(next);
  }
  for (const auto& ln : level) tree.nodes[static_cast<std::size_t>(ln.node)].value = leaf_value(ln);
  return tree;
}

}  // namespace

TreeEnsemble TrainGbm(const Hyperparams& hp, const Dense& train) {
  const int n_trees = static_cast<int>(hp.at("n_trees"));
  const int max_depth = static_cast<int>(hp.at("max_depth"));
  const double lr = hp.at("learning_rate");
  const double lambda = hp.at("lambda");
  const double mcw = hp.at("min_child_weight");
  const std::size_t n = train.rows;

  std::vector<std::vector<std::uint32_t>> sorted(train.cols);
  for (std::size_t j = 0; j < train.cols; ++j) {
    auto& idx = sorted[j];
    idx.resize(n);
    std::iota(idx.begin(), idx.end(), 0u);
    std::stable_sort(idx.begin(), idx.end(), [&](std::uint32_t a, std::uint32_t b) {
      return train.x[a * train.cols + j] < train.x[b * train.cols + j];
    });
  }

  TreeEnsemble e;
  e.boosted = true;
  e.learning_rate = lr;
  double pos = 0;
  for (int y : train.y) pos += y;
  const double prior = std::clamp(pos / static_cast<double>(n), 1e-6, 1.0 - 1e-6);
  e.base_score = std::log(prior / (1.0 - prior));

  std::vector<double> f(n, e.base_score), g(n), h(n);
  for (int t = 0; t < n_trees; ++t) {
    for (std::size_t i = 0; i < n; ++i) {
      const double p = Sigmoid(f[i]);
      g[i] = p - train.y[i];
      h[i] = p * (1.0 - p);
    }
    Tree tree = FitBoostedTree(train, sorted, g, h, max_depth, lambda, mcw);
    double loss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      f[i] += lr * tree.Predict(train.Row(i));
      loss += LogLoss(f[i], train.y[i]);
    }
    e.train_loss.push_back(loss / static_cast<double>(n));
    e.trees.push_back(std::move(tree));
  }
  return e;
}

namespace {

struct ForestBuilder {
  const Dense& d;
  const std::vector<double>& weight;  // bootstrap multiplicity per row
  int max_depth;
  double min_leaf;
  std::size_t mtry;
  Rng& rng;
  Tree tree;

  int Build(std::vector<std::uint32_t>& rows, int depth) {
    const int id = static_cast<int>(tree.nodes.size());
    tree.nodes.push_back({});
    double w_pos = 0.0;
    double w_tot = 0.0;
    for (std::uint32_t i : rows) {
      w_tot += weight[i];
      w_pos += d.y[i] == 1 ? weight[i] : 0.0;
    }
    const double p = w_pos / w_tot;
    const double parent = w_tot * (1.0 - p * p - (1.0 - p) * (1.0 - p));
    tree.nodes[static_cast<std::size_t>(id)].value = p;
    if (depth >= max_depth || parent <= 1e-12 || w_tot < 2.0 * min_leaf) return id;

    // Feature sample via partial Fisher-Yates, then scanned in index order.
    std::vector<std::size_t> feats(d.cols);
    std::iota(feats.begin(), feats.end(), 0);
    for (std::size_t k = 0; k < mtry; ++k) std::swap(feats[k], feats[k + rng.Index(d.cols - k)]);
    feats.resize(mtry);
    std::sort(feats.begin(), feats.end());

    double best_score = parent - 1e-12;
    int best_feature = -1;
    double best_threshold = 0.0;
    for (std::size_t j : feats) {
      std::sort(rows.begin(), rows.end(), [&](std::uint32_t a, std::uint32_t b) {
        const double va = d.x[a * d.cols + j];
        const double vb = d.x[b * d.cols + j];
        return va < vb || (va == vb && a < b);
      });
      double lw = 0.0;
      double lp = 0.0;
      for (std::size_t r = 0; r + 1 < rows.size(); ++r) {
        const std::uint32_t i = rows[r];
        lw += weight[i];
        lp += d.y[i] == 1 ? weight[i] : 0.0;
        const double v = d.x[i * d.cols + j];
        const double next = d.x[rows[r + 1] * d.cols + j];
        if (!(next > v)) continue;
        const double rw = w_tot - lw;
        if (lw < min_leaf || rw < min_leaf) continue;
        const double pl = lp / lw;
        const double pr = (w_pos - lp) / rw;
        const double score = lw * (1.0 - pl * pl - (1.0 - pl) * (1.0 - pl)) +
                             rw * (1.0 - pr * pr - (1.0 - pr) * (1.0 - pr));
        if (score < best_score) {
          best_score = score;
          best_feature = static_cast<int>(j);
          best_threshold = Midpoint(v, next);
        }
      }
    }
    if (best_feature < 0) return id;

    std::vector<std::uint32_t> left, right;
    for (std::uint32_t i : rows) {
      (d.x[i * d.cols + static_cast<std::size_t>(best_feature)] <= best_threshold ? left : right).push_back(i);
    }
    std::vector<std::uint32_t>().swap(rows);
    const int l = Build(left, depth + 1);
    const int r = Build(right, depth + 1);
    TreeNode& node = tree.nodes[static_cast<std::size_t>(id)];
    node.feature = best_feature;
    node.threshold = best_threshold;
    node.left = l;
    node.right = r;
    node.value = 0.0;  // only leaves carry an output
    return id;
  }
};

}  // namespace

TreeEnsemble TrainDrf(const Hyperparams& hp, const Dense& train, std::uint64_t seed, int jobs) {
  const auto n_trees = static_cast<std::size_t>(hp.at("n_trees"));
  const int max_depth = static_cast<int>(hp.at("max_depth"));
  const double min_leaf = hp.at("min_samples_leaf");
  std::size_t mtry = static_cast<std::size_t>(hp.at("mtry"));
  if (mtry == 0) mtry = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(train.cols))));
  mtry = std::clamp<std::size_t>(mtry, 1, train.cols);
  const std::size_t n = train.rows;

  TreeEnsemble e;
  e.trees.resize(n_trees);
  // Out-of-bag predictions per tree, NaN where the row was in the bag.
  std::vector<std::vector<double>> oob(n_trees);
  ParallelFor(n_trees, jobs, [&](std::size_t t) {
    Rng rng(DeriveSeed(seed, "drf-tree-" + std::to_string(t)));
    std::vector<double> weight(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) weight[rng.Index(n)] += 1.0;
    std::vector<std::uint32_t> rows;
    for (std::size_t i = 0; i < n; ++i) {
      if (weight[i] > 0) rows.push_back(static_cast<std::uint32_t>(i));
    }
    ForestBuilder b{train, weight, max_depth, min_leaf, mtry, rng, {}};
    b.Build(rows, 0);
    auto& o = oob[t];
    o.assign(n, std::nan(""));
    for (std::size_t i = 0; i < n; ++i) {
      if (weight[i] == 0) o[i] = b.tree.Predict(train.Row(i));
    }
    e.trees[t] = std::move(b.tree);
  });

  std::size_t counted = 0;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double sum = 0.0;
    int votes = 0;
    for (std::size_t t = 0; t < n_trees; ++t) {
      if (!std::isnan(oob[t][i])) {
        sum += oob[t][i];
        ++votes;
      }
    }
    if (votes == 0) continue;
    ++counted;
    correct += ((sum / votes >= 0.5) ? 1 : 0) == train.y[i] ? 1 : 0;
  }
  e.oob_accuracy = counted > 0 ? static_cast<double>(correct) / static_cast<double>(counted) : 0.0;
  return e;
}

}  // namespace memptec::detail
