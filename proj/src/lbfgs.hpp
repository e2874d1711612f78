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

#include <cmath>
#include <cstddef>
#include <deque>
#include <functional>
#include <vector>

namespace fmss::models::detail {

// Limited-memory BFGS with Armijo backtracking. Fully deterministic; the
// accepted objective sequence is non-increasing by construction of the
// line search.
struct LbfgsOptions {
  int max_iter = 5000;
  double grad_max_norm_tol = 0.0;        // 0 disables this criterion
  double obj_rel_improvement_tol = 0.0;  // 0 disables this criterion
  int history = 10;
};

struct LbfgsResult {
  std::vector<double> x;
  std::vector<double> objective_trace;  // f at x0 and every accepted step
  int iterations = 0;
  bool converged = false;
};

// fn evaluates the objective at x and fills grad (same size as x).
using Objective = std::function<double(const std::vector<double>& x, std::vector<double>& grad)>;

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double max_abs(const std::vector<double>& a) {
  double m = 0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

inline LbfgsResult minimize(const Objective& fn, std::vector<double> x0,
                            const LbfgsOptions& opt) {
  const size_t dim = x0.size();
  LbfgsResult res;
  res.x = std::move(x0);

  std::vector<double> grad(dim, 0.0);
  double f = fn(res.x, grad);
  res.objective_trace.push_back(f);

  struct Pair {
    std::vector<double> s, y;
    double rho;
  };
  std::deque<Pair> history;

  std::vector<double> direction(dim), x_new(dim), grad_new(dim), alpha_buf;

  for (int iter = 0; iter < opt.max_iter; ++iter) {
    if (opt.grad_max_norm_tol > 0 && max_abs(grad) < opt.grad_max_norm_tol) {
      res.converged = true;
      break;
    }

    // Two-loop recursion for p = -H * grad.
    direction = grad;
    alpha_buf.assign(history.size(), 0.0);
    for (size_t h = history.size(); h-- > 0;) {
      const auto& p = history[h];
      alpha_buf[h] = p.rho * dot(p.s, direction);
      for (size_t i = 0; i < dim; ++i) direction[i] -= alpha_buf[h] * p.y[i];
    }
    if (!history.empty()) {
      const auto& last = history.back();
      const double gamma = dot(last.s, last.y) / dot(last.y, last.y);
      for (auto& v : direction) v *= gamma;
    }
    for (size_t h = 0; h < history.size(); ++h) {
      const auto& p = history[h];
      const double beta = p.rho * dot(p.y, direction);
      for (size_t i = 0; i < dim; ++i) direction[i] += (alpha_buf[h] - beta) * p.s[i];
    }
    for (auto& v : direction) v = -v;

    double dir_deriv = dot(grad, direction);
    if (!(dir_deriv < 0)) {  // not a descent direction; fall back to steepest
      for (size_t i = 0; i < dim; ++i) direction[i] = -grad[i];
      dir_deriv = -dot(grad, grad);
      if (!(dir_deriv < 0)) {  // zero gradient
        res.converged = true;
        break;
      }
    }

    // Armijo backtracking.
    double step = history.empty() ? std::min(1.0, 1.0 / std::max(1.0, max_abs(grad))) : 1.0;
    constexpr double kArmijoC1 = 1e-4;
    double f_new = f;
    bool accepted = false;
    for (int half = 0; half < 60; ++half) {
      for (size_t i = 0; i < dim; ++i) x_new[i] = res.x[i] + step * direction[i];
      f_new = fn(x_new, grad_new);
      if (std::isfinite(f_new) && f_new <= f + kArmijoC1 * step * dir_deriv) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;  // no further progress possible at double precision

    Pair pair;
    pair.s.resize(dim);
    pair.y.resize(dim);
    for (size_t i = 0; i < dim; ++i) {
      pair.s[i] = x_new[i] - res.x[i];
      pair.y[i] = grad_new[i] - grad[i];
    }
    const double sy = dot(pair.s, pair.y);
    if (sy > 1e-12) {
      pair.rho = 1.0 / sy;
      history.push_back(std::move(pair));
      if (static_cast<int>(history.size()) > opt.history) history.pop_front();
    }

    res.x.swap(x_new);
    grad.swap(grad_new);
    const double improvement = f - f_new;
    f = f_new;
    res.objective_trace.push_back(f);
    res.iterations = iter + 1;

    if (opt.obj_rel_improvement_tol > 0 &&
        improvement <= opt.obj_rel_improvement_tol * std::max(1.0, std::abs(f))) {
      res.converged = true;
      break;
    }
  }
  return res;
}

}  // namespace fmss::models::detail
