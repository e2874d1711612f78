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

#include "fmss/feature_matrix.hpp"

#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "fmss/error.hpp"
#include "fmss/util.hpp"

namespace fmss {

void FeatureMatrix::validate() const {
  if (sample_ids.size() != values.rows)
    throw Error::validation("feature matrix: row count does not match sample ids");
  if (feature_names.size() != values.cols)
    throw Error::validation("feature matrix: column count does not match names");
  std::set<std::string> ids(sample_ids.begin(), sample_ids.end());
  if (ids.size() != sample_ids.size())
    throw Error::validation("feature matrix: duplicate sample ids");
  std::set<std::string> names(feature_names.begin(), feature_names.end());
  if (names.size() != feature_names.size())
    throw Error::validation("feature matrix: duplicate feature names");
  if (!values.all_finite())
    throw Error::validation("feature matrix: non-finite value");
}

size_t FeatureMatrix::index_of(const std::string& sample_id) const {
  for (size_t i = 0; i < sample_ids.size(); ++i)
    if (sample_ids[i] == sample_id) return i;
  throw Error::validation("feature matrix: unknown sample id '" + sample_id + "'");
}

namespace {

double parse_cell(const std::string& cell, size_t row_number, const std::string& name) {
  const std::string t = trim(cell);
  if (t.empty())
    throw Error::validation("feature csv row " + std::to_string(row_number) +
                            ": empty cell in column '" + name + "'");
  char* end = nullptr;
  double v = std::strtod(t.c_str(), &end);
  if (end != t.c_str() + t.size())
    throw Error::validation("feature csv row " + std::to_string(row_number) +
                            ": non-numeric cell '" + t + "' in column '" + name + "'");
  if (!std::isfinite(v))
    throw Error::validation("feature csv row " + std::to_string(row_number) +
                            ": non-finite value '" + t + "' in column '" + name + "'");
  return v;
}

}  // namespace

FeatureMatrix import_features(const std::filesystem::path& csv_path) {
  std::ifstream in(csv_path);
  if (!in) throw Error::validation("cannot open feature csv: " + csv_path.string());

  std::string line;
  if (!std::getline(in, line))
    throw Error::validation("feature csv is empty: " + csv_path.string());
  if (!line.empty() && line.back() == '\r') line.pop_back();

  auto header = split(line, ',');
  if (header.empty() || trim(header[0]) != "sample_id")
    throw Error::validation("feature csv header must start with 'sample_id': " +
                            csv_path.string());

  FeatureMatrix m;
  for (size_t i = 1; i < header.size(); ++i) {
    std::string name = trim(header[i]);
    if (name.empty())
      throw Error::validation("feature csv header column " + std::to_string(i) + " is empty");
    m.feature_names.push_back(name);
  }

  const size_t n_cols = m.feature_names.size();
  std::set<std::string> seen;
  std::vector<double> body;
  size_t row_number = 1;  // header was row 1
  while (std::getline(in, line)) {
    ++row_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    auto cells = split(line, ',');
    if (cells.size() != n_cols + 1)
      throw Error::validation("feature csv row " + std::to_string(row_number) + ": expected " +
                              std::to_string(n_cols + 1) + " cells, got " +
                              std::to_string(cells.size()));
    std::string id = trim(cells[0]);
    if (id.empty())
      throw Error::validation("feature csv row " + std::to_string(row_number) +
                              ": empty sample_id");
    if (!seen.insert(id).second)
      throw Error::validation("feature csv row " + std::to_string(row_number) +
                              ": duplicate sample_id '" + id + "'");
    m.sample_ids.push_back(id);
    for (size_t c = 0; c < n_cols; ++c)
      body.push_back(parse_cell(cells[c + 1], row_number, m.feature_names[c]));
  }

  m.values.rows = m.sample_ids.size();
  m.values.cols = n_cols;
  m.values.data = std::move(body);
  m.validate();
  return m;
}

void export_features(const FeatureMatrix& m, const std::filesystem::path& csv_path) {
  m.validate();
  for (const auto& name : m.feature_names)
    if (name.find_first_of(",\"\n\r") != std::string::npos)
      throw Error::validation("feature name not representable in csv: '" + name + "'");
  for (const auto& id : m.sample_ids)
    if (id.find_first_of(",\"\n\r") != std::string::npos)
      throw Error::validation("sample id not representable in csv: '" + id + "'");

  std::ofstream out(csv_path);
  if (!out) throw Error::runtime("cannot write feature csv: " + csv_path.string());
  out << "sample_id";
  for (const auto& name : m.feature_names) out << ',' << name;
  out << '\n';
  for (size_t r = 0; r < m.values.rows; ++r) {
    out << m.sample_ids[r];
    for (size_t c = 0; c < m.values.cols; ++c) out << ',' << format_double(m.values.at(r, c));
    out << '\n';
  }
  if (!out) throw Error::runtime("write failed: " + csv_path.string());
}

}  // namespace fmss
