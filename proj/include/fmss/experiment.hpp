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

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "fmss/acoustic.hpp"
#include "fmss/eval.hpp"
#include "fmss/models.hpp"

namespace fmss::exp {

struct AcousticChoice {
  enum class Kind { lite, import_csv, none };
  Kind kind = Kind::lite;
  std::string import_path;

  std::string to_string() const;
  static AcousticChoice parse(const std::string& s);
};

struct TextChoice {
  enum class Kind { tfidf, tfidf_pun, embedding, import_csv, none };
  Kind kind = Kind::tfidf_pun;
  std::string path;  // embedding table or import csv

  std::string to_string() const;
  static TextChoice parse(const std::string& s);
};

// The single source of experiment configuration; every field has a logged
// default and unknown keys are rejected.
struct Manifest {
  // logreg, linsvc, rforest and knn with stock hyperparameters.
  static std::vector<models::ClassifierSpec> default_classifiers();

  std::string corpus_dir;
  std::string merge_scheme = "0,1=low;2,3=moderate;4,5=high";
  AcousticChoice acoustic;
  TextChoice text;
  bool standardize = false;
  std::vector<models::ClassifierSpec> classifiers = default_classifiers();
  eval::CvPlan plan;
  std::string output_dir = "out";
  unsigned threads = 0;  // 0 = all cores
  acoustic::FrameConfig frame;

  static Manifest load(const std::filesystem::path& path);
  static Manifest from_json(const nlohmann::json& j, const std::filesystem::path& base_dir);
  nlohmann::json resolved() const;  // full echo with every default filled in
  void validate_paths() const;
};

// corpus -> features -> fusion -> cross-validated evaluation.
eval::Dataset build_dataset(const Manifest& m, std::vector<std::string>* warnings);

// Runs the experiment and writes report.json, report.txt, confusion/ROC
// CSVs and SVG plots plus resolved_manifest.json into output_dir.
eval::CvReport run_experiment(const Manifest& m);

std::string render_report_text(const eval::CvReport& report);
void write_report_artifacts(const eval::CvReport& report,
                            const std::filesystem::path& out_dir);

struct CompareRow {
  std::string kind;
  double mean_a = 0;
  double mean_b = 0;
  double t = 0;
  double p = 1.0;
  bool significant = false;
};

// Per-classifier significance tests between two reports; requires matching
// plans, seeds and dataset fingerprints (fold partitions must agree for
// the paired test).
std::vector<CompareRow> compare_reports(const eval::CvReport& a, const eval::CvReport& b,
                                        bool paired = true);
std::string render_compare_text(const std::vector<CompareRow>& rows);

}  // namespace fmss::exp
