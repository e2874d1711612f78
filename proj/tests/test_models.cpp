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
#include <filesystem>
#include <vector>

#include "doctest.h"

#include "fmss/error.hpp"
#include "fmss/models.hpp"
#include "fmss/util.hpp"

namespace fs = std::filesystem;
using namespace fmss;
using namespace fmss::models;

namespace {

struct Problem {
  Matrix x;
  std::vector<int> y;
};

// Two well-separated clusters split on the sign of the first feature.
Problem separable_two_class(size_t n, size_t d, uint64_t seed) {
  Rng rng(seed);
  Problem p;
  p.x = Matrix(n, d);
  for (size_t i = 0; i < n; ++i) {
    const int label = i % 2 == 0 ? 0 : 1;
    p.y.push_back(label);
    p.x.at(i, 0) = (label == 0 ? -1.0 : 1.0) * rng.uniform(0.5, 2.0);
    for (size_t j = 1; j < d; ++j) p.x.at(i, j) = 0.3 * rng.normal();
  }
  return p;
}

Problem random_multiclass(size_t n, size_t d, int k, uint64_t seed) {
  Rng rng(seed);
  Problem p;
  p.x = Matrix(n, d);
  for (auto& v : p.x.data) v = rng.normal();
  for (size_t i = 0; i < n; ++i) p.y.push_back(static_cast<int>(rng.below(k)));
  // Ensure every class is present.
  for (int c = 0; c < k; ++c) p.y[static_cast<size_t>(c)] = c;
  return p;
}

double training_accuracy(const TrainedModel& model, const Problem& p) {
  const auto preds = model.predict(p.x);
  size_t hits = 0;
  for (size_t i = 0; i < preds.size(); ++i) hits += preds[i] == p.y[i] ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(preds.size());
}

ClassifierSpec spec_of(ModelKind kind, uint64_t seed = 0) {
  ClassifierSpec s;
  s.kind = kind;
  s.seed = seed;
  return s;
}

// Independent brute-force KNN oracle: full sort by (distance, class),
// majority vote, ties to the class of the nearest tied neighbor.
int knn_oracle(const Matrix& train_x, const std::vector<int>& train_y, int k, int n_classes,
               std::span<const double> q) {
  std::vector<std::pair<double, int>> all;
  for (size_t i = 0; i < train_x.rows; ++i) {
    double dist = 0;
    for (size_t j = 0; j < train_x.cols; ++j)
      dist += (q[j] - train_x.at(i, j)) * (q[j] - train_x.at(i, j));
    all.emplace_back(dist, train_y[i]);
  }
  std::sort(all.begin(), all.end());
  const size_t kk = std::min<size_t>(static_cast<size_t>(k), all.size());
  std::vector<int> votes(static_cast<size_t>(n_classes), 0);
  for (size_t i = 0; i < kk; ++i) ++votes[static_cast<size_t>(all[i].second)];
  const int top = *std::max_element(votes.begin(), votes.end());
  for (size_t i = 0; i < kk; ++i)
    if (votes[static_cast<size_t>(all[i].second)] == top) return all[i].second;
  return 0;
}

}  // namespace

TEST_CASE("logreg separates a linearly separable two-class problem") {
  const auto p = separable_two_class(40, 4, 17);
  const auto model = train(spec_of(ModelKind::logreg), p.x, p.y);
  CHECK(training_accuracy(model, p) == 1.0);

  // The objective trace of the optimizer never increases.
  REQUIRE(model.diagnostics().objective_traces.size() == 1);
  const auto& trace = model.diagnostics().objective_traces[0];
  REQUIRE(trace.size() >= 2);
  for (size_t i = 1; i < trace.size(); ++i) CHECK(trace[i] <= trace[i - 1] + 1e-12);
}

TEST_CASE("logreg scores are softmax probabilities") {
  const auto p = random_multiclass(60, 5, 3, 23);
  const auto model = train(spec_of(ModelKind::logreg), p.x, p.y);
  const auto scores = model.decision_scores(p.x);
  for (size_t i = 0; i < scores.rows; ++i) {
    double sum = 0;
    for (size_t c = 0; c < scores.cols; ++c) {
      CHECK(scores.at(i, c) >= 0.0);
      sum += scores.at(i, c);
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("linsvc one-vs-rest scorers are independent of other classes' identities") {
  const auto p = random_multiclass(50, 4, 3, 31);
  const auto a = train(spec_of(ModelKind::linsvc), p.x, p.y);

  // Swapping the labels of classes 0 and 1 leaves the class-2 binary
  // problem, hence its scorer, untouched.
  auto swapped = p.y;
  for (auto& v : swapped) v = v == 0 ? 1 : (v == 1 ? 0 : v);
  const auto b = train(spec_of(ModelKind::linsvc), p.x, swapped);

  const auto& ma = a.payload<LinSvcModel>();
  const auto& mb = b.payload<LinSvcModel>();
  for (size_t j = 0; j < ma.weights.cols; ++j)
    CHECK(ma.weights.at(2, j) == mb.weights.at(2, j));
  CHECK(ma.bias[2] == mb.bias[2]);
}

TEST_CASE("linsvc trains one scorer per class on separable data") {
  const auto p = separable_two_class(40, 3, 41);
  const auto model = train(spec_of(ModelKind::linsvc), p.x, p.y);
  CHECK(training_accuracy(model, p) == 1.0);
  CHECK(model.decision_scores(p.x).cols == 2);
  for (const auto& trace : model.diagnostics().objective_traces)
    for (size_t i = 1; i < trace.size(); ++i) CHECK(trace[i] <= trace[i - 1] + 1e-12);
}

TEST_CASE("random forest memorizes distinct-row training data") {
  const auto p = random_multiclass(60, 8, 3, 57);
  const auto model = train(spec_of(ModelKind::rforest, 123), p.x, p.y);
  CHECK(training_accuracy(model, p) >= 0.95);
}

TEST_CASE("random forest votes are fractions that sum to one") {
  const auto p = separable_two_class(30, 3, 77);
  const auto model = train(spec_of(ModelKind::rforest, 5), p.x, p.y);
  const auto scores = model.decision_scores(p.x);
  for (size_t i = 0; i < scores.rows; ++i) {
    double sum = 0;
    for (size_t c = 0; c < scores.cols; ++c) sum += scores.at(i, c);
    CHECK(sum == doctest::Approx(1.0));
  }

  // One clean separating feature: every tree splits on it, so a deep probe
  // draws a unanimous vote with score exactly 1.
  const auto clean = separable_two_class(30, 1, 78);
  const auto unanimous = train(spec_of(ModelKind::rforest, 5), clean.x, clean.y);
  Matrix probe(1, 1);
  probe.at(0, 0) = -1.5;
  const auto s = unanimous.decision_scores(probe);
  CHECK(s.at(0, 0) == 1.0);
  CHECK(s.at(0, 1) == 0.0);
}

TEST_CASE("knn matches the brute-force oracle") {
  for (uint64_t seed = 0; seed < 5; ++seed) {
    const auto p = random_multiclass(50, 10, 3, 1000 + seed);
    const auto model = train(spec_of(ModelKind::knn), p.x, p.y);

    Rng rng(2000 + seed);
    Matrix queries(30, 10);
    for (auto& v : queries.data) v = rng.normal();
    const auto preds = model.predict(queries);
    for (size_t i = 0; i < queries.rows; ++i)
      CHECK(preds[i] == knn_oracle(p.x, p.y, 5, 3, queries.row(i)));
  }
}

TEST_CASE("knn vote fractions and the documented tie rule") {
  // Query at the origin; distances: c1 at 1.5 and 4, c0 at 2 and 3, c2 at 5.
  Matrix x(5, 1);
  x.at(0, 0) = 2.0;
  x.at(1, 0) = 3.0;
  x.at(2, 0) = 1.5;
  x.at(3, 0) = 4.0;
  x.at(4, 0) = 5.0;
  const std::vector<int> y = {0, 0, 1, 1, 2};
  const auto model = train(spec_of(ModelKind::knn), x, y);

  Matrix q(1, 1);
  q.at(0, 0) = 0.0;
  const auto scores = model.decision_scores(q);
  CHECK(scores.at(0, 0) == doctest::Approx(0.4));
  CHECK(scores.at(0, 1) == doctest::Approx(0.4));
  CHECK(scores.at(0, 2) == doctest::Approx(0.2));
  // 2-2 vote tie: class 1 owns the nearest neighbor (distance 1.5).
  CHECK(model.predict(q)[0] == 1);
}

TEST_CASE("knn clamps k to the training size") {
  Matrix x(2, 1);
  x.at(0, 0) = 0.0;
  x.at(1, 0) = 10.0;
  const std::vector<int> y = {0, 1};
  const auto model = train(spec_of(ModelKind::knn), x, y);  // k = 5 > n = 2
  Matrix q(1, 1);
  q.at(0, 0) = 1.0;
  CHECK(model.predict(q)[0] == 0);  // 1-1 tie resolved to the nearest point
}

TEST_CASE("knn prediction survives a single-point model") {
  KnnModel payload;
  payload.train_x = Matrix(1, 2);
  payload.train_x.at(0, 0) = 3.0;
  payload.train_y = {0};
  payload.k = 5;
  const TrainedModel model(spec_of(ModelKind::knn), {7}, 2, payload, {});
  Matrix q(2, 2);
  q.at(1, 0) = -100.0;
  const auto preds = model.predict(q);
  CHECK(preds[0] == 7);
  CHECK(preds[1] == 7);
}

TEST_CASE("knn is invariant to training-row order, including distance ties") {
  Rng rng(4242);
  Matrix x(24, 3);
  for (auto& v : x.data) v = std::round(rng.normal() * 2.0) / 2.0;  // force ties
  std::vector<int> y;
  for (size_t i = 0; i < 24; ++i) y.push_back(static_cast<int>(rng.below(3)));
  for (int c = 0; c < 3; ++c) y[static_cast<size_t>(c)] = c;

  Matrix queries(15, 3);
  for (auto& v : queries.data) v = std::round(rng.normal() * 2.0) / 2.0;

  const auto base = train(spec_of(ModelKind::knn), x, y).predict(queries);

  std::vector<size_t> perm(24);
  for (size_t i = 0; i < 24; ++i) perm[i] = i;
  rng.shuffle(perm);
  Matrix xp = x.take_rows(perm);
  std::vector<int> yp;
  for (size_t i : perm) yp.push_back(y[i]);

  const auto permuted = train(spec_of(ModelKind::knn), xp, yp).predict(queries);
  CHECK(base == permuted);
}

TEST_CASE("argmax of decision scores agrees with predict for every kind") {
  const auto p = random_multiclass(45, 6, 3, 909);
  Rng rng(910);
  Matrix queries(25, 6);
  for (auto& v : queries.data) v = rng.normal();

  for (ModelKind kind :
       {ModelKind::logreg, ModelKind::linsvc, ModelKind::rforest, ModelKind::knn}) {
    const auto model = train(spec_of(kind, 3), p.x, p.y);
    const auto preds = model.predict(queries);
    const auto scores = model.decision_scores(queries);
    for (size_t i = 0; i < queries.rows; ++i) {
      double best = scores.at(i, 0);
      for (size_t c = 1; c < scores.cols; ++c) best = std::max(best, scores.at(i, c));
      const size_t pred_col = static_cast<size_t>(preds[i]);
      CAPTURE(to_string(kind));
      CHECK(scores.at(i, pred_col) == best);
    }
  }
}

TEST_CASE("training is deterministic for identical inputs") {
  const auto p = random_multiclass(40, 5, 3, 321);
  for (ModelKind kind :
       {ModelKind::logreg, ModelKind::linsvc, ModelKind::rforest, ModelKind::knn}) {
    const auto a = train(spec_of(kind, 99), p.x, p.y);
    const auto b = train(spec_of(kind, 99), p.x, p.y);
    CAPTURE(to_string(kind));
    CHECK(a.to_json().dump() == b.to_json().dump());
  }
}

TEST_CASE("training rejects single-class targets and NaN features") {
  Matrix x(4, 2, 1.0);
  CHECK_THROWS_WITH_AS(train(spec_of(ModelKind::logreg), x, {1, 1, 1, 1}),
                       doctest::Contains("2 classes"), Error);
  x.at(1, 1) = std::nan("");
  CHECK_THROWS_WITH_AS(train(spec_of(ModelKind::knn), x, {0, 1, 0, 1}),
                       doctest::Contains("NaN"), Error);
  Matrix ok(4, 2, 1.0);
  CHECK_THROWS_AS(train(spec_of(ModelKind::knn), ok, {0, 1, 0}), Error);
}

TEST_CASE("predict rejects width mismatches") {
  const auto p = separable_two_class(20, 3, 5);
  const auto model = train(spec_of(ModelKind::linsvc), p.x, p.y);
  Matrix wrong(2, 4, 0.0);
  CHECK_THROWS_WITH_AS(model.predict(wrong), doctest::Contains("features"), Error);
  CHECK_THROWS_AS(model.decision_scores(wrong), Error);
}

TEST_CASE("models round-trip exactly through their json files") {
  const fs::path dir = fs::temp_directory_path() / "fmss_tests" / "models";
  fs::create_directories(dir);
  const auto p = random_multiclass(30, 4, 3, 777);
  Rng rng(778);
  Matrix queries(10, 4);
  for (auto& v : queries.data) v = rng.normal();

  for (ModelKind kind :
       {ModelKind::logreg, ModelKind::linsvc, ModelKind::rforest, ModelKind::knn}) {
    const auto model = train(spec_of(kind, 11), p.x, p.y);
    const fs::path path = dir / (std::string(to_string(kind)) + ".json");
    model.save(path);
    const auto loaded = TrainedModel::load(path);

    CAPTURE(to_string(kind));
    CHECK(loaded.to_json().dump() == model.to_json().dump());
    CHECK(loaded.predict(queries) == model.predict(queries));
    CHECK(loaded.decision_scores(queries).data == model.decision_scores(queries).data);
  }
}
