// Copyright 2026 The fmss-warmth Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fmss/util.hpp"
#include "models_impl.hpp"

namespace fmss::models::detail {

namespace {

struct SplitChoice {
  bool found = false;
  int feature = -1;
  double threshold = 0;
  double impurity = 1e300;
};

// Weighted Gini of the best threshold on one feature; counts are scanned
// incrementally over the value-sorted node samples.
void scan_feature(const Matrix& x, const std::vector<int>& yi, size_t n_classes,
                  const std::vector<size_t>& node, int feature,
                  std::vector<std::pair<double, int>>& scratch, SplitChoice& best) {
  scratch.clear();
  for (size_t idx : node) scratch.emplace_back(x.at(idx, static_cast<size_t>(feature)), yi[idx]);
  std::sort(scratch.begin(), scratch.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  const size_t n = scratch.size();
  std::vector<size_t> left(n_classes, 0), right(n_classes, 0);
  for (const auto& [v, c] : scratch) ++right[static_cast<size_t>(c)];

  double left_sq = 0;  // sum of squared class counts, maintained incrementally
  double right_sq = 0;
  for (size_t c = 0; c < n_classes; ++c)
    right_sq += static_cast<double>(right[c]) * static_cast<double>(right[c]);

  for (size_t i = 0; i + 1 < n; ++i) {
    const size_t c = static_cast<size_t>(scratch[i].second);
    left_sq += 2.0 * static_cast<double>(left[c]) + 1.0;
    right_sq -= 2.0 * static_cast<double>(right[c]) - 1.0;
    ++left[c];
    --right[c];
    if (scratch[i].first == scratch[i + 1].first) continue;  // no boundary here

    const double nl = static_cast<double>(i + 1);
    const double nr = static_cast<double>(n - i - 1);
    // weighted gini = nl/n (1 - left_sq/nl^2) + nr/n (1 - right_sq/nr^2)
    const double weighted = (nl - left_sq / nl + nr - right_sq / nr) / static_cast<double>(n);
    if (weighted < best.impurity) {
      best.found = true;
      best.impurity = weighted;
      best.feature = feature;
      best.threshold = 0.5 * (scratch[i].first + scratch[i + 1].first);
    }
  }
}

class TreeBuilder {
 public:
  TreeBuilder(const ForestParams& params, const Matrix& x, const std::vector<int>& yi,
              size_t n_classes, Rng rng)
      : params_(params), x_(x), yi_(yi), n_classes_(n_classes), rng_(rng) {
    n_candidates_ = static_cast<size_t>(
        std::max(1.0, std::floor(std::sqrt(static_cast<double>(x.cols)))));
    feature_pool_.resize(x.cols);
    std::iota(feature_pool_.begin(), feature_pool_.end(), 0);
  }

  Tree build(std::vector<size_t> bootstrap) {
    tree_.nodes.clear();
    grow(std::move(bootstrap));
    return std::move(tree_);
  }

 private:
  int grow(std::vector<size_t> node) {
    const int node_id = static_cast<int>(tree_.nodes.size());
    tree_.nodes.emplace_back();

    std::vector<size_t> counts(n_classes_, 0);
    for (size_t idx : node) ++counts[static_cast<size_t>(yi_[idx])];
    const size_t majority =
        static_cast<size_t>(std::max_element(counts.begin(), counts.end()) - counts.begin());
    const bool pure = counts[majority] == node.size();

    if (pure || node.size() < static_cast<size_t>(params_.min_samples_split)) {
      tree_.nodes[node_id].leaf_class = static_cast<int>(majority);
      return node_id;
    }

    // Draw floor(sqrt(d)) candidate features without replacement.
    SplitChoice best;
    std::vector<std::pair<double, int>> scratch;
    for (size_t i = 0; i < n_candidates_; ++i) {
      const size_t j = i + rng_.below(feature_pool_.size() - i);
      std::swap(feature_pool_[i], feature_pool_[j]);
      scan_feature(x_, yi_, n_classes_, node, feature_pool_[i], scratch, best);
    }
    if (!best.found) {
      // Candidates were constant on this node; fall back to every feature.
      for (size_t f = 0; f < x_.cols; ++f)
        scan_feature(x_, yi_, n_classes_, node, static_cast<int>(f), scratch, best);
    }
    if (!best.found) {  // duplicate rows with conflicting labels
      tree_.nodes[node_id].leaf_class = static_cast<int>(majority);
      return node_id;
    }

    std::vector<size_t> left, right;
    for (size_t idx : node) {
      if (x_.at(idx, static_cast<size_t>(best.feature)) <= best.threshold)
        left.push_back(idx);
      else
        right.push_back(idx);
    }
    node.clear();
    node.shrink_to_fit();

    tree_.nodes[node_id].feature = best.feature;
    tree_.nodes[node_id].threshold = best.threshold;
    const int l = grow(std::move(left));
    const int r = grow(std::move(right));
    tree_.nodes[node_id].left = l;
    tree_.nodes[node_id].right = r;
    return node_id;
  }

  const ForestParams& params_;
  const Matrix& x_;
  const std::vector<int>& yi_;
  size_t n_classes_;
  Rng rng_;
  size_t n_candidates_;
  std::vector<int> feature_pool_;
  Tree tree_;
};

int tree_predict(const Tree& tree, std::span<const double> row) {
  int node = 0;
  for (;;) {
    const TreeNode& nd = tree.nodes[static_cast<size_t>(node)];
    if (nd.feature < 0) return nd.leaf_class;
    node = row[static_cast<size_t>(nd.feature)] <= nd.threshold ? nd.left : nd.right;
  }
}

}  // namespace

ForestModel train_forest(const ForestParams& p, uint64_t seed, const Matrix& x,
                         const std::vector<int>& yi, size_t n_classes) {
  ForestModel model;
  model.trees.resize(static_cast<size_t>(p.n_trees));
  const size_t n = x.rows;
  // One RNG stream per tree keyed on (seed, tree index), so any parallel
  // build schedule would produce the same forest.
  for (size_t t = 0; t < model.trees.size(); ++t) {
    Rng rng(mix_seed(seed, t));
    std::vector<size_t> bootstrap(n);
    for (size_t i = 0; i < n; ++i) bootstrap[i] = rng.below(n);
    TreeBuilder builder(p, x, yi, n_classes, rng);
    model.trees[t] = builder.build(std::move(bootstrap));
  }
  return model;
}

Matrix forest_scores(const ForestModel& m, size_t n_classes, const Matrix& x) {
  Matrix scores(x.rows, n_classes);
  const double inv = 1.0 / static_cast<double>(m.trees.size());
  for (size_t i = 0; i < x.rows; ++i) {
    const auto row = x.row(i);
    for (const auto& tree : m.trees)
      scores.at(i, static_cast<size_t>(tree_predict(tree, row))) += 1.0;
    for (size_t c = 0; c < n_classes; ++c) scores.at(i, c) *= inv;
  }
  return scores;
}

}  // namespace fmss::models::detail
