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

#include "fmss/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "fmss/error.hpp"

namespace fmss::fusion {

FeatureMatrix concat(const FeatureMatrix& ac, const FeatureMatrix& tx) {
  ac.validate();
  tx.validate();

  std::set<std::string> ac_ids(ac.sample_ids.begin(), ac.sample_ids.end());
  std::set<std::string> tx_ids(tx.sample_ids.begin(), tx.sample_ids.end());
  if (ac_ids != tx_ids) {
    std::string missing;
    for (const auto& id : ac_ids)
      if (!tx_ids.count(id)) missing += " -" + id;
    for (const auto& id : tx_ids)
      if (!ac_ids.count(id)) missing += " +" + id;
    throw Error::validation("concat: sample id sets differ:" + missing +
                            " (- only acoustic, + only text)");
  }

  std::map<std::string, size_t> tx_row;
  for (size_t i = 0; i < tx.sample_ids.size(); ++i) tx_row[tx.sample_ids[i]] = i;

  FeatureMatrix out;
  out.sample_ids = ac.sample_ids;
  out.feature_names.reserve(ac.feature_names.size() + tx.feature_names.size());
  for (const auto& n : ac.feature_names) out.feature_names.push_back("ac:" + n);
  for (const auto& n : tx.feature_names) out.feature_names.push_back("tx:" + n);

  out.values = Matrix(ac.values.rows, ac.values.cols + tx.values.cols);
  for (size_t r = 0; r < out.values.rows; ++r) {
    auto dst = out.values.row(r);
    auto a = ac.values.row(r);
    std::copy(a.begin(), a.end(), dst.begin());
    auto t = tx.values.row(tx_row.at(ac.sample_ids[r]));
    std::copy(t.begin(), t.end(), dst.begin() + static_cast<long>(ac.values.cols));
  }
  return out;
}

FeatureMatrix standardize(const FeatureMatrix& m, std::span<const size_t> training_rows) {
  m.validate();
  if (training_rows.empty())
    throw Error::validation("standardize: training row subset is empty");
  for (size_t r : training_rows)
    if (r >= m.values.rows)
      throw Error::validation("standardize: training row index out of range");

  FeatureMatrix out = m;
  const double n = static_cast<double>(training_rows.size());
  for (size_t c = 0; c < m.values.cols; ++c) {
    double sum = 0, sum_sq = 0;
    for (size_t r : training_rows) {
      const double v = m.values.at(r, c);
      sum += v;
      sum_sq += v * v;
    }
    const double mean = sum / n;
    double var = sum_sq / n - mean * mean;
    if (var <= 0) continue;  // zero-variance column passes through
    const double inv_std = 1.0 / std::sqrt(var);
    for (size_t r = 0; r < m.values.rows; ++r)
      out.values.at(r, c) = (m.values.at(r, c) - mean) * inv_std;
  }
  return out;
}

}  // namespace fmss::fusion
