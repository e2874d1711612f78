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

#include "fmss/models.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include "fmss/error.hpp"
#include "models_impl.hpp"

namespace fmss::models {

using nlohmann::json;

const char* to_string(ModelKind k) {
  switch (k) {
    case ModelKind::logreg: return "logreg";
    case ModelKind::linsvc: return "linsvc";
    case ModelKind::rforest: return "rforest";
    case ModelKind::knn: return "knn";
  }
  return "?";
}

ModelKind kind_from_string(const std::string& s) {
  if (s == "logreg") return ModelKind::logreg;
  if (s == "linsvc") return ModelKind::linsvc;
  if (s == "rforest") return ModelKind::rforest;
  if (s == "knn") return ModelKind::knn;
  throw Error::validation("unknown classifier kind '" + s + "'");
}

json ClassifierSpec::hyperparameters_json() const {
  json j;
  switch (kind) {
    case ModelKind::logreg:
      j = {{"C", logreg.c}, {"grad_tol", logreg.grad_tol}, {"max_iter", logreg.max_iter},
           {"multiclass", "multinomial"}};
      break;
    case ModelKind::linsvc:
      j = {{"C", linsvc.c}, {"obj_tol", linsvc.obj_tol}, {"max_iter", linsvc.max_iter},
           {"loss", "squared_hinge"}, {"multiclass", "one_vs_rest"}};
      break;
    case ModelKind::rforest:
      j = {{"n_trees", forest.n_trees}, {"min_samples_split", forest.min_samples_split},
           {"max_features", "sqrt"}, {"criterion", "gini"}};
      break;
    case ModelKind::knn:
      j = {{"k", knn.k}, {"metric", "euclidean"}};
      break;
  }
  j["seed"] = seed;
  return j;
}

ClassifierSpec ClassifierSpec::from_json(const json& j) {
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string())
    throw Error::validation("classifier spec: expected an object with a 'kind' string");
  ClassifierSpec spec;
  spec.kind = kind_from_string(j["kind"].get<std::string>());
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& key = it.key();
    if (key == "kind") continue;
    if (key == "seed") {
      spec.seed = it.value().get<uint64_t>();
    } else if (key == "C" &&
               (spec.kind == ModelKind::logreg || spec.kind == ModelKind::linsvc)) {
      spec.logreg.c = spec.linsvc.c = it.value().get<double>();
    } else if (key == "max_iter" &&
               (spec.kind == ModelKind::logreg || spec.kind == ModelKind::linsvc)) {
      spec.logreg.max_iter = spec.linsvc.max_iter = it.value().get<int>();
    } else if (key == "grad_tol" && spec.kind == ModelKind::logreg) {
      spec.logreg.grad_tol = it.value().get<double>();
    } else if (key == "obj_tol" && spec.kind == ModelKind::linsvc) {
      spec.linsvc.obj_tol = it.value().get<double>();
    } else if (key == "n_trees" && spec.kind == ModelKind::rforest) {
      spec.forest.n_trees = it.value().get<int>();
    } else if (key == "min_samples_split" && spec.kind == ModelKind::rforest) {
      spec.forest.min_samples_split = it.value().get<int>();
    } else if (key == "k" && spec.kind == ModelKind::knn) {
      spec.knn.k = it.value().get<int>();
    } else {
      throw Error::validation("classifier spec: unknown field '" + key + "' for kind " +
                              to_string(spec.kind));
    }
  }
  if (spec.kind == ModelKind::rforest && spec.forest.n_trees < 1)
    throw Error::validation("classifier spec: n_trees must be >= 1");
  if (spec.kind == ModelKind::knn && spec.knn.k < 1)
    throw Error::validation("classifier spec: k must be >= 1");
  return spec;
}

TrainedModel::TrainedModel(ClassifierSpec spec, std::vector<int> classes, size_t n_features,
                           std::variant<LogRegModel, LinSvcModel, ForestModel, KnnModel> payload,
                           TrainDiagnostics diagnostics)
    : spec_(std::move(spec)),
      classes_(std::move(classes)),
      n_features_(n_features),
      payload_(std::move(payload)),
      diagnostics_(std::move(diagnostics)) {}

TrainedModel train(const ClassifierSpec& spec, const Matrix& x, const std::vector<int>& y) {
  if (x.rows != y.size())
    throw Error::validation("train: feature rows (" + std::to_string(x.rows) +
                            ") do not match labels (" + std::to_string(y.size()) + ")");
  if (x.rows == 0) throw Error::validation("train: empty training set");
  if (!x.all_finite()) throw Error::validation("train: NaN or Inf in features");

  std::set<int> class_set(y.begin(), y.end());
  if (class_set.size() < 2)
    throw Error::validation("train: need at least 2 classes, got " +
                            std::to_string(class_set.size()));
  std::vector<int> classes(class_set.begin(), class_set.end());

  // Internally labels are class indices in classes() order.
  std::vector<int> yi(y.size());
  for (size_t i = 0; i < y.size(); ++i) {
    const auto it = std::lower_bound(classes.begin(), classes.end(), y[i]);
    yi[i] = static_cast<int>(it - classes.begin());
  }
  const size_t k = classes.size();

  TrainDiagnostics diag;
  switch (spec.kind) {
    case ModelKind::logreg: {
      auto m = detail::train_logreg(spec.logreg, x, yi, k, diag);
      return TrainedModel(spec, std::move(classes), x.cols, std::move(m), std::move(diag));
    }
    case ModelKind::linsvc: {
      auto m = detail::train_linsvc(spec.linsvc, x, yi, k, diag);
      return TrainedModel(spec, std::move(classes), x.cols, std::move(m), std::move(diag));
    }
    case ModelKind::rforest: {
      auto m = detail::train_forest(spec.forest, spec.seed, x, yi, k);
      return TrainedModel(spec, std::move(classes), x.cols, std::move(m), std::move(diag));
    }
    case ModelKind::knn: {
      KnnModel m;
      m.train_x = x;
      m.train_y = yi;
      m.k = spec.knn.k;
      return TrainedModel(spec, std::move(classes), x.cols, std::move(m), std::move(diag));
    }
  }
  throw Error::runtime("train: unreachable");
}

Matrix TrainedModel::decision_scores(const Matrix& x) const {
  if (x.cols != n_features_)
    throw Error::validation("decision_scores: expected " + std::to_string(n_features_) +
                            " features, got " + std::to_string(x.cols));
  const size_t k = classes_.size();
  switch (spec_.kind) {
    case ModelKind::logreg:
      return detail::logreg_scores(payload<LogRegModel>(), x);
    case ModelKind::linsvc:
      return detail::linsvc_scores(payload<LinSvcModel>(), x);
    case ModelKind::rforest:
      return detail::forest_scores(payload<ForestModel>(), k, x);
    case ModelKind::knn:
      return detail::knn_scores(payload<KnnModel>(), k, x);
  }
  throw Error::runtime("decision_scores: unreachable");
}

std::vector<int> TrainedModel::predict(const Matrix& x) const {
  if (x.cols != n_features_)
    throw Error::validation("predict: expected " + std::to_string(n_features_) +
                            " features, got " + std::to_string(x.cols));
  std::vector<int> out(x.rows);

  if (spec_.kind == ModelKind::knn) {
    const auto& m = payload<KnnModel>();
    for (size_t i = 0; i < x.rows; ++i)
      out[i] = classes_[static_cast<size_t>(
          detail::knn_predict_row(m, classes_.size(), x.row(i)))];
    return out;
  }

  // argmax of decision scores; ties resolve to the lowest class index.
  const Matrix scores = decision_scores(x);
  for (size_t i = 0; i < x.rows; ++i) {
    size_t best = 0;
    for (size_t c = 1; c < classes_.size(); ++c)
      if (scores.at(i, c) > scores.at(i, best)) best = c;
    out[i] = classes_[best];
  }
  return out;
}

namespace {

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (size_t r = 0; r < m.rows; ++r) {
    json row = json::array();
    for (size_t c = 0; c < m.cols; ++c) row.push_back(m.at(r, c));
    rows.push_back(std::move(row));
  }
  return json{{"rows", m.rows}, {"cols", m.cols}, {"data", std::move(rows)}};
}

Matrix matrix_from_json(const json& j) {
  Matrix m(j.at("rows").get<size_t>(), j.at("cols").get<size_t>());
  const auto& rows = j.at("data");
  if (rows.size() != m.rows) throw Error::validation("model file: matrix row count mismatch");
  for (size_t r = 0; r < m.rows; ++r) {
    const auto& row = rows[r];
    if (row.size() != m.cols)
      throw Error::validation("model file: matrix column count mismatch");
    for (size_t c = 0; c < m.cols; ++c) m.at(r, c) = row[c].get<double>();
  }
  return m;
}

}  // namespace

json TrainedModel::to_json() const {
  json j;
  j["format"] = "fmss-model";
  j["version"] = 1;
  j["kind"] = to_string(spec_.kind);
  j["classes"] = classes_;
  j["n_features"] = n_features_;
  j["hyperparameters"] = spec_.hyperparameters_json();

  switch (spec_.kind) {
    case ModelKind::logreg: {
      const auto& m = payload<LogRegModel>();
      j["payload"] = {{"weights", matrix_to_json(m.weights)}, {"bias", m.bias}};
      break;
    }
    case ModelKind::linsvc: {
      const auto& m = payload<LinSvcModel>();
      j["payload"] = {{"weights", matrix_to_json(m.weights)}, {"bias", m.bias}};
      break;
    }
    case ModelKind::rforest: {
      const auto& m = payload<ForestModel>();
      json trees = json::array();
      for (const auto& tree : m.trees) {
        json nodes = json::array();
        for (const auto& nd : tree.nodes)
          nodes.push_back({nd.feature, nd.threshold, nd.left, nd.right, nd.leaf_class});
        trees.push_back(std::move(nodes));
      }
      j["payload"] = {{"trees", std::move(trees)}};
      break;
    }
    case ModelKind::knn: {
      const auto& m = payload<KnnModel>();
      j["payload"] = {{"train_x", matrix_to_json(m.train_x)}, {"train_y", m.train_y},
                      {"k", m.k}};
      break;
    }
  }
  return j;
}

TrainedModel TrainedModel::from_json(const json& j) {
  if (!j.is_object() || j.value("format", "") != "fmss-model")
    throw Error::validation("model file: missing fmss-model format marker");
  if (j.value("version", 0) != 1)
    throw Error::validation("model file: unsupported version");

  ClassifierSpec spec;
  spec.kind = kind_from_string(j.at("kind").get<std::string>());
  const json& hp = j.at("hyperparameters");
  spec.seed = hp.value("seed", 0ull);
  switch (spec.kind) {
    case ModelKind::logreg:
      spec.logreg.c = hp.at("C").get<double>();
      spec.logreg.grad_tol = hp.at("grad_tol").get<double>();
      spec.logreg.max_iter = hp.at("max_iter").get<int>();
      break;
    case ModelKind::linsvc:
      spec.linsvc.c = hp.at("C").get<double>();
      spec.linsvc.obj_tol = hp.at("obj_tol").get<double>();
      spec.linsvc.max_iter = hp.at("max_iter").get<int>();
      break;
    case ModelKind::rforest:
      spec.forest.n_trees = hp.at("n_trees").get<int>();
      spec.forest.min_samples_split = hp.at("min_samples_split").get<int>();
      break;
    case ModelKind::knn:
      spec.knn.k = hp.at("k").get<int>();
      break;
  }

  auto classes = j.at("classes").get<std::vector<int>>();
  const size_t n_features = j.at("n_features").get<size_t>();
  const json& payload = j.at("payload");

  switch (spec.kind) {
    case ModelKind::logreg: {
      LogRegModel m;
      m.weights = matrix_from_json(payload.at("weights"));
      m.bias = payload.at("bias").get<std::vector<double>>();
      return TrainedModel(spec, std::move(classes), n_features, std::move(m), {});
    }
    case ModelKind::linsvc: {
      LinSvcModel m;
      m.weights = matrix_from_json(payload.at("weights"));
      m.bias = payload.at("bias").get<std::vector<double>>();
      return TrainedModel(spec, std::move(classes), n_features, std::move(m), {});
    }
    case ModelKind::rforest: {
      ForestModel m;
      for (const auto& tree_json : payload.at("trees")) {
        Tree tree;
        for (const auto& nd : tree_json) {
          TreeNode node;
          node.feature = nd.at(0).get<int>();
          node.threshold = nd.at(1).get<double>();
          node.left = nd.at(2).get<int>();
          node.right = nd.at(3).get<int>();
          node.leaf_class = nd.at(4).get<int>();
          tree.nodes.push_back(node);
        }
        m.trees.push_back(std::move(tree));
      }
      return TrainedModel(spec, std::move(classes), n_features, std::move(m), {});
    }
    case ModelKind::knn: {
      KnnModel m;
      m.train_x = matrix_from_json(payload.at("train_x"));
      m.train_y = payload.at("train_y").get<std::vector<int>>();
      m.k = payload.at("k").get<int>();
      return TrainedModel(spec, std::move(classes), n_features, std::move(m), {});
    }
  }
  throw Error::runtime("from_json: unreachable");
}

void TrainedModel::save(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw Error::runtime("cannot write model file: " + path.string());
  out << to_json().dump(2) << '\n';
  if (!out) throw Error::runtime("write failed: " + path.string());
}

TrainedModel TrainedModel::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error::validation("cannot open model file: " + path.string());
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded())
    throw Error::validation("model file is not valid json: " + path.string());
  return from_json(j);
}

}  // namespace fmss::models
