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

#include <vector>

#include "fmss/models.hpp"

namespace fmss::models::detail {

// yi holds class indices 0..K-1 aligned with x rows.

LogRegModel train_logreg(const LogRegParams& p, const Matrix& x, const std::vector<int>& yi,
                         size_t n_classes, TrainDiagnostics& diag);
Matrix logreg_scores(const LogRegModel& m, const Matrix& x);  // softmax probabilities

LinSvcModel train_linsvc(const LinSvcParams& p, const Matrix& x, const std::vector<int>& yi,
                         size_t n_classes, TrainDiagnostics& diag);
Matrix linsvc_scores(const LinSvcModel& m, const Matrix& x);  // signed margins

ForestModel train_forest(const ForestParams& p, uint64_t seed, const Matrix& x,
                         const std::vector<int>& yi, size_t n_classes);
Matrix forest_scores(const ForestModel& m, size_t n_classes, const Matrix& x);

Matrix knn_scores(const KnnModel& m, size_t n_classes, const Matrix& x);
int knn_predict_row(const KnnModel& m, size_t n_classes, std::span<const double> row);

}  // namespace fmss::models::detail
