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

#include "lbfgs.hpp"
#include "models_impl.hpp"

namespace fmss::models::detail {

// Multinomial softmax regression with an L2 penalty of strength 1/C on the
// weights (bias unpenalized), minimized with L-BFGS until the gradient
// max-norm drops below grad_tol.
LogRegModel train_logreg(const LogRegParams& p, const Matrix& x, const std::vector<int>& yi,
                         size_t n_classes, TrainDiagnostics& diag) {
  const size_t n = x.rows, d = x.cols, k = n_classes;
  const double inv_c = 1.0 / p.c;

  // Parameter layout: weights row-major K x d, then K bias terms.
  auto objective = [&](const std::vector<double>& theta, std::vector<double>& grad) {
    std::fill(grad.begin(), grad.end(), 0.0);
    double loss = 0;
    std::vector<double> z(k);
    for (size_t i = 0; i < n; ++i) {
      const auto row = x.row(i);
      double zmax = -1e300;
      for (size_t c = 0; c < k; ++c) {
        double v = theta[k * d + c];
        const double* w = theta.data() + c * d;
        for (size_t j = 0; j < d; ++j) v += w[j] * row[j];
        z[c] = v;
        zmax = std::max(zmax, v);
      }
      double denom = 0;
      for (size_t c = 0; c < k; ++c) {
        z[c] = std::exp(z[c] - zmax);
        denom += z[c];
      }
      const size_t target = static_cast<size_t>(yi[i]);
      loss -= std::log(z[target] / denom);
      for (size_t c = 0; c < k; ++c) {
        const double r = z[c] / denom - (c == target ? 1.0 : 0.0);
        double* gw = grad.data() + c * d;
        for (size_t j = 0; j < d; ++j) gw[j] += r * row[j];
        grad[k * d + c] += r;
      }
    }
    for (size_t c = 0; c < k; ++c) {
      const double* w = theta.data() + c * d;
      double* gw = grad.data() + c * d;
      for (size_t j = 0; j < d; ++j) {
        loss += 0.5 * inv_c * w[j] * w[j];
        gw[j] += inv_c * w[j];
      }
    }
    return loss;
  };

  LbfgsOptions opt;
  opt.max_iter = p.max_iter;
  opt.grad_max_norm_tol = p.grad_tol;
  auto result = minimize(objective, std::vector<double>(k * d + k, 0.0), opt);
  diag.objective_traces.push_back(std::move(result.objective_trace));

  LogRegModel model;
  model.weights = Matrix(k, d);
  model.bias.resize(k);
  for (size_t c = 0; c < k; ++c) {
    for (size_t j = 0; j < d; ++j) model.weights.at(c, j) = result.x[c * d + j];
    model.bias[c] = result.x[k * d + c];
  }
  return model;
}

Matrix logreg_scores(const LogRegModel& m, const Matrix& x) {
  const size_t k = m.weights.rows, d = m.weights.cols;
  Matrix scores(x.rows, k);
  std::vector<double> z(k);
  for (size_t i = 0; i < x.rows; ++i) {
    const auto row = x.row(i);
    double zmax = -1e300;
    for (size_t c = 0; c < k; ++c) {
      double v = m.bias[c];
      const auto w = m.weights.row(c);
      for (size_t j = 0; j < d; ++j) v += w[j] * row[j];
      z[c] = v;
      zmax = std::max(zmax, v);
    }
    double denom = 0;
    for (size_t c = 0; c < k; ++c) {
      z[c] = std::exp(z[c] - zmax);
      denom += z[c];
    }
    for (size_t c = 0; c < k; ++c) scores.at(i, c) = z[c] / denom;
  }
  return scores;
}

// One-vs-rest squared-hinge SVM: per class, minimize
//   0.5 w'w + C sum_i max(0, 1 - s_i w'x~_i)^2
// over the bias-augmented (and therefore penalized) weight vector. Stops
// on relative objective improvement below obj_tol.
LinSvcModel train_linsvc(const LinSvcParams& p, const Matrix& x, const std::vector<int>& yi,
                         size_t n_classes, TrainDiagnostics& diag) {
  const size_t n = x.rows, d = x.cols;

  LinSvcModel model;
  model.weights = Matrix(n_classes, d);
  model.bias.resize(n_classes);

  for (size_t cls = 0; cls < n_classes; ++cls) {
    std::vector<double> sign(n);
    for (size_t i = 0; i < n; ++i) sign[i] = yi[i] == static_cast<int>(cls) ? 1.0 : -1.0;

    auto objective = [&](const std::vector<double>& w, std::vector<double>& grad) {
      double obj = 0;
      for (size_t j = 0; j <= d; ++j) {
        obj += 0.5 * w[j] * w[j];
        grad[j] = w[j];
      }
      for (size_t i = 0; i < n; ++i) {
        const auto row = x.row(i);
        double z = w[d];
        for (size_t j = 0; j < d; ++j) z += w[j] * row[j];
        const double margin = 1.0 - sign[i] * z;
        if (margin <= 0) continue;
        obj += p.c * margin * margin;
        const double coeff = -2.0 * p.c * margin * sign[i];
        for (size_t j = 0; j < d; ++j) grad[j] += coeff * row[j];
        grad[d] += coeff;
      }
      return obj;
    };

    LbfgsOptions opt;
    opt.max_iter = p.max_iter;
    opt.obj_rel_improvement_tol = p.obj_tol;
    auto result = minimize(objective, std::vector<double>(d + 1, 0.0), opt);
    diag.objective_traces.push_back(std::move(result.objective_trace));

    for (size_t j = 0; j < d; ++j) model.weights.at(cls, j) = result.x[j];
    model.bias[cls] = result.x[d];
  }
  return model;
}

Matrix linsvc_scores(const LinSvcModel& m, const Matrix& x) {
  const size_t k = m.weights.rows, d = m.weights.cols;
  Matrix scores(x.rows, k);
  for (size_t i = 0; i < x.rows; ++i) {
    const auto row = x.row(i);
    for (size_t c = 0; c < k; ++c) {
      double v = m.bias[c];
      const auto w = m.weights.row(c);
      for (size_t j = 0; j < d; ++j) v += w[j] * row[j];
      scores.at(i, c) = v;
    }
  }
  return scores;
}

}  // namespace fmss::models::detail
