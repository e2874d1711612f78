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

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

#include "fmss/matrix.hpp"

namespace fmss::models {

enum class ModelKind { logreg, linsvc, rforest, knn };

const char* to_string(ModelKind k);
ModelKind kind_from_string(const std::string& s);

// Defaults mirror widely used library defaults, with iteration caps raised
// to 5000 so small imbalanced problems converge.
struct LogRegParams {
  double c = 1.0;           // L2 penalty strength is 1/c
  double grad_tol = 1e-4;   // stop when gradient max-norm drops below
  int max_iter = 5000;
};

struct LinSvcParams {
  double c = 1.0;
  double obj_tol = 1e-4;    // relative objective-improvement tolerance
  int max_iter = 5000;
};

struct ForestParams {
  int n_trees = 100;
  int min_samples_split = 2;  // grow until pure or fewer samples
};

struct KnnParams {
  int k = 5;
};

struct ClassifierSpec {
  ModelKind kind = ModelKind::logreg;
  LogRegParams logreg;
  LinSvcParams linsvc;
  ForestParams forest;
  KnnParams knn;
  uint64_t seed = 0;

  // Resolved hyperparameters of the active kind, echoed into reports.
  nlohmann::json hyperparameters_json() const;
  static ClassifierSpec from_json(const nlohmann::json& j);
};

struct TrainDiagnostics {
  // Objective value per accepted optimizer iterate; one trace for the
  // multinomial problem, one per class for one-vs-rest training.
  std::vector<std::vector<double>> objective_traces;
};

struct LogRegModel {
  Matrix weights;             // K x d
  std::vector<double> bias;   // K
};

struct LinSvcModel {
  Matrix weights;             // K x d, one one-vs-rest scorer per class
  std::vector<double> bias;   // K (trained as an augmented, penalized column)
};

struct TreeNode {
  int feature = -1;      // -1 marks a leaf
  double threshold = 0;  // go left when x[feature] <= threshold
  int left = -1;
  int right = -1;
  int leaf_class = -1;   // class index at leaves
};

struct Tree {
  std::vector<TreeNode> nodes;  // node 0 is the root
};

struct ForestModel {
  std::vector<Tree> trees;
};

struct KnnModel {
  Matrix train_x;
  std::vector<int> train_y;  // class indices
  int k = 5;
};

// One of the four classifier kinds with learned parameters. predict and
// decision_scores are defined for exactly the trained class list; score
// columns follow classes() order.
class TrainedModel {
 public:
  TrainedModel(ClassifierSpec spec, std::vector<int> classes, size_t n_features,
               std::variant<LogRegModel, LinSvcModel, ForestModel, KnnModel> payload,
               TrainDiagnostics diagnostics);

  ModelKind kind() const { return spec_.kind; }
  const ClassifierSpec& spec() const { return spec_; }
  const std::vector<int>& classes() const { return classes_; }
  size_t n_features() const { return n_features_; }
  const TrainDiagnostics& diagnostics() const { return diagnostics_; }

  std::vector<int> predict(const Matrix& x) const;
  // logreg: softmax probabilities; linsvc: signed margins; rforest: tree
  // vote fractions; knn: neighbor vote fractions.
  Matrix decision_scores(const Matrix& x) const;

  nlohmann::json to_json() const;
  static TrainedModel from_json(const nlohmann::json& j);
  void save(const std::filesystem::path& path) const;
  static TrainedModel load(const std::filesystem::path& path);

  template <typename T>
  const T& payload() const { return std::get<T>(payload_); }

 private:
  ClassifierSpec spec_;
  std::vector<int> classes_;
  size_t n_features_ = 0;
  std::variant<LogRegModel, LinSvcModel, ForestModel, KnnModel> payload_;
  TrainDiagnostics diagnostics_;
};

// Errors on single-class targets, NaN features, or row/label mismatch.
// Training is deterministic: identical (spec, x, y) produce bit-identical
// models, including the forest under a fixed seed.
TrainedModel train(const ClassifierSpec& spec, const Matrix& x, const std::vector<int>& y);

}  // namespace fmss::models
