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

#include <span>

#include "fmss/feature_matrix.hpp"

namespace fmss::fusion {

// Concatenates acoustic and text features for the same samples. Rows are
// aligned by sample id (ac row order is canonical); columns are the ac
// columns then the tx columns, names prefixed "ac:" / "tx:". Mismatched id
// sets raise an error listing the symmetric difference.
FeatureMatrix concat(const FeatureMatrix& ac, const FeatureMatrix& tx);

// Per column: subtract the mean and divide by the population std computed
// on training_rows only. Zero-variance columns pass through unchanged.
FeatureMatrix standardize(const FeatureMatrix& m, std::span<const size_t> training_rows);

}  // namespace fmss::fusion
