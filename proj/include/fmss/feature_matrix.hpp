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

#include <filesystem>
#include <string>
#include <vector>

#include "fmss/matrix.hpp"

namespace fmss {

// Named, ordered feature columns keyed by sample id. The common currency
// between acoustic extraction, text features, fusion and the classifiers.
// Invariants: unique ids and names, row order matches sample_ids, all
// values finite.
struct FeatureMatrix {
  std::vector<std::string> sample_ids;
  std::vector<std::string> feature_names;
  Matrix values;

  void validate() const;
  size_t index_of(const std::string& sample_id) const;  // throws if absent
};

// CSV schema: header `sample_id,<name>,...`, one row per sample. Values
// are written with round-trip precision so export/import is lossless.
FeatureMatrix import_features(const std::filesystem::path& csv_path);
void export_features(const FeatureMatrix& m, const std::filesystem::path& csv_path);

}  // namespace fmss
