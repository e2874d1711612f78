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

#include "models_impl.hpp"

namespace fmss::models::detail {

namespace {

// Neighbors ordered by (squared distance, class index); ordering by class
// rather than training row makes the vote invariant to training-row order.
std::vector<std::pair<double, int>> nearest(const KnnModel& m, std::span<const double> row) {
  std::vector<std::pair<double, int>> all;
  all.reserve(m.train_x.rows);
  for (size_t i = 0; i < m.train_x.rows; ++i) {
    const auto train_row = m.train_x.row(i);
    double d = 0;
    for (size_t j = 0; j < train_row.size(); ++j) {
      const double diff = row[j] - train_row[j];
      d += diff * diff;
    }
    all.emplace_back(d, m.train_y[i]);
  }
  const size_t k = std::min<size_t>(static_cast<size_t>(m.k), all.size());
  std::partial_sort(all.begin(), all.begin() + static_cast<long>(k), all.end());
  all.resize(k);
  return all;
}

}  // namespace

Matrix knn_scores(const KnnModel& m, size_t n_classes, const Matrix& x) {
  Matrix scores(x.rows, n_classes);
  for (size_t i = 0; i < x.rows; ++i) {
    const auto neighbors = nearest(m, x.row(i));
    const double inv = 1.0 / static_cast<double>(neighbors.size());
    for (const auto& [dist, cls] : neighbors)
      scores.at(i, static_cast<size_t>(cls)) += inv;
  }
  return scores;
}

int knn_predict_row(const KnnModel& m, size_t n_classes, std::span<const double> row) {
  const auto neighbors = nearest(m, row);
  std::vector<size_t> votes(n_classes, 0);
  for (const auto& [dist, cls] : neighbors) ++votes[static_cast<size_t>(cls)];
  const size_t top = *std::max_element(votes.begin(), votes.end());

  size_t tied = 0;
  for (size_t c = 0; c < n_classes; ++c) tied += votes[c] == top ? 1 : 0;
  if (tied == 1)
    return static_cast<int>(std::max_element(votes.begin(), votes.end()) - votes.begin());

  // Tie: the class of the nearest neighbor among tied classes wins; the
  // (distance, class) neighbor ordering resolves equal distances toward
  // the lowest class index.
  for (const auto& [dist, cls] : neighbors)
    if (votes[static_cast<size_t>(cls)] == top) return cls;
  return 0;  // unreachable: neighbors always cover the top vote
}

}  // namespace fmss::models::detail
