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

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "fmss/feature_matrix.hpp"
#include "fmss/matrix.hpp"
#include "fmss/models.hpp"
#include "fmss/textfeat.hpp"

namespace fmss::eval {

// grouping=by_interview keeps both twin samples of one interview on the
// same side of every fold (the same caregiver's voice appears in both);
// default none matches the per-sample protocol.
enum class Grouping { none, by_interview };

struct CvPlan {
  int k = 5;
  int runs = 5;
  uint64_t base_seed = 42;  // run r uses fold seed base_seed + r
  Grouping grouping = Grouping::none;
};

// Shuffles within each class by seed and deals members out so per-fold
// class counts differ by at most one; classes smaller than k are spread
// as evenly as possible. Returns a fold index per sample.
std::vector<int> stratified_kfold(std::span<const int> y, int k, uint64_t seed);

// Same contract with whole groups assigned to folds; stratification uses
// one representative label per group (its first sample's label).
std::vector<int> stratified_group_kfold(std::span<const int> y,
                                        std::span<const std::string> groups, int k,
                                        uint64_t seed);

enum class Averaging { macro, weighted, micro };

// Per-class F1 = 2PR/(P+R) with the 0-convention when P+R = 0. Classes are
// 0..n_classes-1 (defaults to the largest label seen + 1).
double f1_score(std::span<const int> y_true, std::span<const int> y_pred, Averaging averaging,
                std::optional<int> n_classes = std::nullopt);

// Rows = true class, columns = predicted class.
Matrix confusion_matrix(std::span<const int> y_true, std::span<const int> y_pred,
                        int n_classes);

struct RocCurve {
  std::vector<std::pair<double, double>> points;  // (FPR, TPR), starts at (0,0)
  double auc = 0;
};

// One-vs-rest ROC with tied scores grouped; AUC by the trapezoid rule.
// Errors when y_true contains only one side of the binarization.
RocCurve roc_curve(std::span<const int> y_true, std::span<const double> scores,
                   int positive_class);

struct TTestResult {
  double t = 0;
  double df = 0;
  double p = 1.0;
};

// paired: one-sample t on differences (requires matched fold partitions);
// otherwise Welch. Two-sided p. Zero-variance degenerate inputs follow the
// documented convention: p = 1 when the mean difference is 0, else p = 0.
TTestResult t_test(std::span<const double> a, std::span<const double> b, bool paired);

// Student-t distribution helpers (regularized incomplete beta).
double student_t_cdf(double t, double df);

// ---------------------------------------------------------------------------
// Cross-validated evaluation over a dataset.

enum class TextFeatureKind { none, tfidf, fixed };

struct Dataset {
  std::vector<std::string> sample_ids;
  std::vector<int> labels;                   // class indices 0..K-1
  std::vector<std::string> class_names;      // size K
  std::vector<std::string> group_ids;        // per sample; required for grouping

  std::optional<FeatureMatrix> acoustic;     // row order matches sample_ids
  TextFeatureKind text_kind = TextFeatureKind::none;
  std::vector<text::TokenStream> docs;       // per sample, when text_kind == tfidf
  std::optional<FeatureMatrix> text_fixed;   // when text_kind == fixed
  bool standardize = false;

  void validate() const;
  uint64_t fingerprint() const;  // hash of ids + labels, used to pair reports
};

// Assembles the design matrix for one fold: TF-IDF is fitted on the
// training rows only, fixed blocks pass through, fusion prefixes ac:/tx:,
// optional standardization uses training-row statistics.
FeatureMatrix build_fold_features(const Dataset& ds, std::span<const size_t> train_rows);

struct FoldScore {
  double macro = 0;
  double weighted = 0;
  double micro = 0;
  int n_test = 0;
};

struct RocResult {
  int class_index = 0;
  double auc = 0;
  std::vector<std::pair<double, double>> points;
};

struct RunResult {
  uint64_t fold_seed = 0;
  std::vector<FoldScore> folds;
  FoldScore run_mean;
  Matrix confusion;               // K x K, aggregated over the run's folds
  std::vector<RocResult> roc;     // per class, pooled out-of-fold scores
};

struct AveragingSummary {
  double mean_runs = 0;   // mean of run-level means (the headline number)
  double std_runs = 0;    // population std over run-level means
  double mean_folds = 0;  // mean over all runs*k fold scores
  double std_folds = 0;   // population std over all fold scores
};

struct ClassifierResult {
  models::ClassifierSpec spec;
  std::vector<RunResult> runs;
  AveragingSummary macro, weighted, micro;

  std::vector<double> fold_scores(Averaging a) const;  // runs*k values, run-major
};

struct PairwiseTest {
  std::string kind_a, kind_b;
  double t = 0;
  double p = 1.0;
  bool significant = false;  // alpha = 0.05
};

struct DatasetSummary {
  size_t n_samples = 0;
  std::vector<std::string> class_names;
  std::vector<int> class_counts;
  uint64_t fingerprint = 0;
  size_t acoustic_cols = 0;
  std::string text_kind;
  bool standardize = false;
};

struct CvReport {
  CvPlan plan;
  DatasetSummary dataset;
  std::vector<ClassifierResult> classifiers;
  std::vector<PairwiseTest> pairwise;  // paired t-tests on weighted fold F1
  std::vector<std::string> warnings;
  nlohmann::json config_echo;  // resolved manifest, filled by the CLI layer

  nlohmann::json to_json() const;
  static CvReport from_json(const nlohmann::json& j);
  void save(const std::filesystem::path& path) const;
  static CvReport load(const std::filesystem::path& path);
};

// Repeated stratified k-fold evaluation of every spec. Fold-dependent
// steps (TF-IDF fitting, standardization) are re-fitted inside each
// training fold; every sample is tested exactly once per run; the report
// is byte-identical across reruns with the same inputs.
CvReport run_cv(const Dataset& ds, std::span<const models::ClassifierSpec> specs,
                const CvPlan& plan, unsigned threads = 0);

}  // namespace fmss::eval
