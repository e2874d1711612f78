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

#include <cmath>
#include <vector>

#include "doctest.h"

#include "fmss/error.hpp"
#include "fmss/fusion.hpp"
#include "fmss/util.hpp"

using namespace fmss;
using namespace fmss::fusion;

namespace {

FeatureMatrix make(std::vector<std::string> ids, std::vector<std::string> names,
                   std::vector<double> values) {
  FeatureMatrix m;
  m.sample_ids = std::move(ids);
  m.feature_names = std::move(names);
  m.values.rows = m.sample_ids.size();
  m.values.cols = m.feature_names.size();
  m.values.data = std::move(values);
  return m;
}

}  // namespace

TEST_CASE("concat joins columns with ac:/tx: prefixes, preserving values") {
  const auto ac = make({"s1", "s2"}, {"a", "b", "c"}, {1, 2, 3, 4, 5, 6});
  const auto tx = make({"s1", "s2"}, {"x", "y"}, {7, 8, 9, 10});
  const auto fused = concat(ac, tx);

  CHECK(fused.sample_ids == std::vector<std::string>{"s1", "s2"});
  CHECK(fused.feature_names ==
        std::vector<std::string>{"ac:a", "ac:b", "ac:c", "tx:x", "tx:y"});
  CHECK(fused.values.data == std::vector<double>{1, 2, 3, 7, 8, 4, 5, 6, 9, 10});
}

TEST_CASE("concat aligns rows by sample id when input orders differ") {
  const auto ac = make({"s1", "s2"}, {"a"}, {1, 2});
  const auto tx = make({"s2", "s1"}, {"x"}, {20, 10});
  const auto fused = concat(ac, tx);
  CHECK(fused.values.data == std::vector<double>{1, 10, 2, 20});
}

TEST_CASE("concat rejects mismatched id sets, naming the difference") {
  const auto ac = make({"s1", "s2"}, {"a"}, {1, 2});
  const auto tx = make({"s3", "s4"}, {"x"}, {3, 4});
  CHECK_THROWS_WITH_AS(concat(ac, tx), doctest::Contains("-s1"), Error);
  CHECK_THROWS_WITH_AS(concat(ac, tx), doctest::Contains("+s3"), Error);
}

TEST_CASE("concat with an empty text block equals the acoustic block") {
  const auto ac = make({"s1", "s2"}, {"a", "b"}, {1, 2, 3, 4});
  const auto tx = make({"s1", "s2"}, {}, {});
  const auto fused = concat(ac, tx);
  CHECK(fused.feature_names == std::vector<std::string>{"ac:a", "ac:b"});
  CHECK(fused.values.data == ac.values.data);
}

TEST_CASE("standardize centers and scales from training rows only") {
  const auto m = make({"s1", "s2", "s3"}, {"a", "c"}, {1, 5, 3, 5, 9, 5});
  const std::vector<size_t> train = {0, 1};
  const auto out = standardize(m, train);

  // Column a over training rows {1, 3}: mean 2, population std 1.
  CHECK(out.values.at(0, 0) == doctest::Approx(-1.0));
  CHECK(out.values.at(1, 0) == doctest::Approx(1.0));
  // Test row outside the training range is allowed to exceed |1|.
  CHECK(out.values.at(2, 0) == doctest::Approx(7.0));
  // Constant column passes through unchanged.
  CHECK(out.values.at(0, 1) == 5.0);
  CHECK(out.values.at(2, 1) == 5.0);
}

TEST_CASE("standardize leaves training columns at mean 0, std 1") {
  Rng rng(3);
  FeatureMatrix m;
  m.values = Matrix(20, 6);
  for (size_t r = 0; r < 20; ++r) {
    m.sample_ids.push_back("s" + std::to_string(r));
    for (size_t c = 0; c < 6; ++c) m.values.at(r, c) = rng.normal() * (1.0 + 10.0 * c);
  }
  for (size_t c = 0; c < 6; ++c) m.feature_names.push_back("f" + std::to_string(c));

  std::vector<size_t> train;
  for (size_t r = 0; r < 12; ++r) train.push_back(r);
  const auto out = standardize(m, train);

  for (size_t c = 0; c < 6; ++c) {
    double mean = 0;
    for (size_t r : train) mean += out.values.at(r, c);
    mean /= static_cast<double>(train.size());
    double var = 0;
    for (size_t r : train) var += std::pow(out.values.at(r, c) - mean, 2);
    var /= static_cast<double>(train.size());
    CHECK(std::abs(mean) < 1e-9);
    CHECK(std::abs(std::sqrt(var) - 1.0) < 1e-9);
  }
}

TEST_CASE("standardize requires a non-empty training subset") {
  const auto m = make({"s1"}, {"a"}, {1});
  CHECK_THROWS_AS(standardize(m, {}), Error);
}
