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

#include "fmss/eval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <set>

#include "fmss/error.hpp"
#include "fmss/fusion.hpp"
#include "fmss/util.hpp"

namespace fmss::eval {

using nlohmann::json;

std::vector<int> stratified_kfold(std::span<const int> y, int k, uint64_t seed) {
  if (k < 2) throw Error::validation("stratified_kfold: k must be >= 2");
  const size_t n = y.size();
  if (n < static_cast<size_t>(k))
    throw Error::validation("stratified_kfold: n (" + std::to_string(n) + ") < k (" +
                            std::to_string(k) + ")");

  std::set<int> class_set(y.begin(), y.end());
  std::vector<int> classes(class_set.begin(), class_set.end());

  std::vector<int> fold(n, -1);
  for (size_t ci = 0; ci < classes.size(); ++ci) {
    std::vector<size_t> members;
    for (size_t i = 0; i < n; ++i)
      if (y[i] == classes[ci]) members.push_back(i);

    Rng rng(mix_seed(seed, ci));
    rng.shuffle(members);

    // Counts per fold differ by at most one; the fold receiving the first
    // extra rotates with the class index so no fold is always the largest.
    const size_t base = members.size() / static_cast<size_t>(k);
    const size_t extra = members.size() % static_cast<size_t>(k);
    size_t pos = 0;
    for (int j = 0; j < k; ++j) {
      const int fold_id = static_cast<int>((ci + static_cast<size_t>(j)) % static_cast<size_t>(k));
      const size_t count = base + (static_cast<size_t>(j) < extra ? 1 : 0);
      for (size_t m = 0; m < count; ++m) fold[members[pos++]] = fold_id;
    }
  }
  return fold;
}

std::vector<int> stratified_group_kfold(std::span<const int> y,
                                        std::span<const std::string> groups, int k,
                                        uint64_t seed) {
  if (groups.size() != y.size())
    throw Error::validation("stratified_group_kfold: group list does not match labels");

  std::vector<std::string> group_order;
  std::map<std::string, size_t> group_index;
  std::vector<int> rep_label;
  for (size_t i = 0; i < y.size(); ++i) {
    auto [it, inserted] = group_index.emplace(groups[i], group_order.size());
    if (inserted) {
      group_order.push_back(groups[i]);
      rep_label.push_back(y[i]);
    }
  }

  const auto group_folds = stratified_kfold(rep_label, k, seed);
  std::vector<int> fold(y.size());
  for (size_t i = 0; i < y.size(); ++i) fold[i] = group_folds[group_index.at(groups[i])];
  return fold;
}

namespace {

int infer_classes(std::span<const int> y_true, std::span<const int> y_pred,
                  std::optional<int> n_classes) {
  int k = n_classes.value_or(0);
  for (int v : y_true) k = std::max(k, v + 1);
  for (int v : y_pred) k = std::max(k, v + 1);
  return k;
}

}  // namespace

double f1_score(std::span<const int> y_true, std::span<const int> y_pred, Averaging averaging,
                std::optional<int> n_classes) {
  if (y_true.size() != y_pred.size())
    throw Error::validation("f1_score: length mismatch (" + std::to_string(y_true.size()) +
                            " vs " + std::to_string(y_pred.size()) + ")");
  if (y_true.empty()) throw Error::validation("f1_score: empty input");
  for (int v : y_true)
    if (v < 0) throw Error::validation("f1_score: negative label");
  for (int v : y_pred)
    if (v < 0) throw Error::validation("f1_score: negative label");

  const int k = infer_classes(y_true, y_pred, n_classes);
  std::vector<double> tp(k, 0), fp(k, 0), fn(k, 0);
  for (size_t i = 0; i < y_true.size(); ++i) {
    if (y_true[i] == y_pred[i])
      tp[y_true[i]] += 1;
    else {
      fp[y_pred[i]] += 1;
      fn[y_true[i]] += 1;
    }
  }

  if (averaging == Averaging::micro) {
    double tps = 0, fps = 0, fns = 0;
    for (int c = 0; c < k; ++c) {
      tps += tp[c];
      fps += fp[c];
      fns += fn[c];
    }
    const double denom = 2 * tps + fps + fns;
    return denom == 0 ? 0.0 : 2 * tps / denom;
  }

  double weighted_sum = 0, support_sum = 0, macro_sum = 0;
  for (int c = 0; c < k; ++c) {
    const double denom = 2 * tp[c] + fp[c] + fn[c];
    const double f1 = denom == 0 ? 0.0 : 2 * tp[c] / denom;
    const double support = tp[c] + fn[c];
    macro_sum += f1;
    weighted_sum += support * f1;
    support_sum += support;
  }
  if (averaging == Averaging::macro) return macro_sum / k;
  return support_sum == 0 ? 0.0 : weighted_sum / support_sum;
}

Matrix confusion_matrix(std::span<const int> y_true, std::span<const int> y_pred,
                        int n_classes) {
  if (y_true.size() != y_pred.size())
    throw Error::validation("confusion_matrix: length mismatch");
  Matrix cm(static_cast<size_t>(n_classes), static_cast<size_t>(n_classes));
  for (size_t i = 0; i < y_true.size(); ++i) {
    if (y_true[i] < 0 || y_true[i] >= n_classes || y_pred[i] < 0 || y_pred[i] >= n_classes)
      throw Error::validation("confusion_matrix: label outside class set");
    cm.at(static_cast<size_t>(y_true[i]), static_cast<size_t>(y_pred[i])) += 1;
  }
  return cm;
}

RocCurve roc_curve(std::span<const int> y_true, std::span<const double> scores,
                   int positive_class) {
  if (y_true.size() != scores.size())
    throw Error::validation("roc_curve: length mismatch");
  for (double s : scores)
    if (!std::isfinite(s)) throw Error::validation("roc_curve: non-finite score");

  size_t pos = 0;
  for (int v : y_true) pos += v == positive_class ? 1 : 0;
  const size_t neg = y_true.size() - pos;
  if (pos == 0 || neg == 0)
    throw Error::validation("roc_curve: AUC undefined, y_true has a single class");

  std::vector<size_t> order(y_true.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return a < b;
  });

  RocCurve out;
  out.points.emplace_back(0.0, 0.0);
  size_t tp = 0, fpos = 0;
  double prev_fpr = 0, prev_tpr = 0;
  size_t i = 0;
  while (i < order.size()) {
    const double threshold = scores[order[i]];
    // Advance over the whole tie group at this threshold.
    while (i < order.size() && scores[order[i]] == threshold) {
      if (y_true[order[i]] == positive_class)
        ++tp;
      else
        ++fpos;
      ++i;
    }
    const double tpr = static_cast<double>(tp) / static_cast<double>(pos);
    const double fpr = static_cast<double>(fpos) / static_cast<double>(neg);
    out.points.emplace_back(fpr, tpr);
    out.auc += (fpr - prev_fpr) * (tpr + prev_tpr) / 2.0;
    prev_fpr = fpr;
    prev_tpr = tpr;
  }
  return out;
}

namespace {

// Regularized incomplete beta via Lentz's continued fraction.
double betacf(double a, double b, double x) {
  constexpr int kMaxIter = 300;
  constexpr double kEps = 3e-16;
  constexpr double kFpMin = 1e-300;

  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kFpMin) d = kFpMin;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kFpMin) d = kFpMin;
    c = 1.0 + aa / c;
    if (std::abs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kFpMin) d = kFpMin;
    c = 1.0 + aa / c;
    if (std::abs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) break;
  }
  return h;
}

double betai(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double bt = std::exp(std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                             a * std::log(x) + b * std::log(1.0 - x));
  if (x < (a + 1.0) / (a + b + 2.0)) return bt * betacf(a, b, x) / a;
  return 1.0 - bt * betacf(b, a, 1.0 - x) / b;
}

}  // namespace

double student_t_cdf(double t, double df) {
  if (df <= 0) throw Error::validation("student_t_cdf: df must be > 0");
  const double x = df / (df + t * t);
  const double tail = 0.5 * betai(df / 2.0, 0.5, x);
  return t >= 0 ? 1.0 - tail : tail;
}

TTestResult t_test(std::span<const double> a, std::span<const double> b, bool paired) {
  if (a.size() < 2 || b.size() < 2)
    throw Error::validation("t_test: need at least 2 scores per side");

  TTestResult res;
  if (paired) {
    if (a.size() != b.size())
      throw Error::validation("t_test: paired test requires equal lengths");
    const size_t n = a.size();
    double mean = 0;
    for (size_t i = 0; i < n; ++i) mean += a[i] - b[i];
    mean /= static_cast<double>(n);
    double var = 0;
    for (size_t i = 0; i < n; ++i) {
      const double d = a[i] - b[i] - mean;
      var += d * d;
    }
    var /= static_cast<double>(n - 1);
    res.df = static_cast<double>(n - 1);
    if (var == 0) {
      res.t = mean == 0 ? 0.0 : (mean > 0 ? 1e308 : -1e308);
      res.p = mean == 0 ? 1.0 : 0.0;
      return res;
    }
    res.t = mean / std::sqrt(var / static_cast<double>(n));
  } else {
    auto moments = [](std::span<const double> v) {
      double mean = 0;
      for (double x : v) mean += x;
      mean /= static_cast<double>(v.size());
      double var = 0;
      for (double x : v) var += (x - mean) * (x - mean);
      var /= static_cast<double>(v.size() - 1);
      return std::pair<double, double>(mean, var);
    };
    const auto [ma, va] = moments(a);
    const auto [mb, vb] = moments(b);
    const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    const double se_sq = va / na + vb / nb;
    if (se_sq == 0) {
      res.df = na + nb - 2;
      res.t = ma == mb ? 0.0 : (ma > mb ? 1e308 : -1e308);
      res.p = ma == mb ? 1.0 : 0.0;
      return res;
    }
    res.t = (ma - mb) / std::sqrt(se_sq);
    const double num = se_sq * se_sq;
    const double den = (va / na) * (va / na) / (na - 1) + (vb / nb) * (vb / nb) / (nb - 1);
    res.df = num / den;
  }
  res.p = 2.0 * (1.0 - student_t_cdf(std::abs(res.t), res.df));
  res.p = std::clamp(res.p, 0.0, 1.0);
  return res;
}

// ---------------------------------------------------------------------------

void Dataset::validate() const {
  const size_t n = sample_ids.size();
  if (n == 0) throw Error::validation("dataset: no samples");
  if (labels.size() != n) throw Error::validation("dataset: labels do not match samples");
  if (class_names.empty()) throw Error::validation("dataset: class names missing");
  for (int label : labels)
    if (label < 0 || label >= static_cast<int>(class_names.size()))
      throw Error::validation("dataset: label outside class set");
  if (!group_ids.empty() && group_ids.size() != n)
    throw Error::validation("dataset: group ids do not match samples");

  if (acoustic) {
    acoustic->validate();
    if (acoustic->sample_ids != sample_ids)
      throw Error::validation("dataset: acoustic rows not aligned with sample ids");
  }
  if (text_kind == TextFeatureKind::tfidf && docs.size() != n)
    throw Error::validation("dataset: token streams do not match samples");
  if (text_kind == TextFeatureKind::fixed) {
    if (!text_fixed) throw Error::validation("dataset: fixed text features missing");
    text_fixed->validate();
    if (text_fixed->sample_ids != sample_ids)
      throw Error::validation("dataset: text rows not aligned with sample ids");
  }
  if (!acoustic && text_kind == TextFeatureKind::none)
    throw Error::validation("dataset: no feature source configured");
}

uint64_t Dataset::fingerprint() const {
  uint64_t h = 1469598103934665603ull;
  for (size_t i = 0; i < sample_ids.size(); ++i) {
    h = fnv1a(sample_ids[i], h);
    h = fnv1a(std::to_string(labels[i]), h);
  }
  return h;
}

FeatureMatrix build_fold_features(const Dataset& ds, std::span<const size_t> train_rows) {
  std::optional<FeatureMatrix> text_block;
  if (ds.text_kind == TextFeatureKind::tfidf) {
    std::vector<text::TokenStream> train_docs;
    train_docs.reserve(train_rows.size());
    for (size_t r : train_rows) train_docs.push_back(ds.docs[r]);
    const auto model = text::fit_tfidf(train_docs);

    FeatureMatrix tx;
    tx.sample_ids = ds.sample_ids;
    tx.feature_names = model.vocabulary;
    tx.values = Matrix(ds.sample_ids.size(), model.vocabulary.size());
    for (size_t r = 0; r < ds.sample_ids.size(); ++r) {
      const auto v = text::transform_tfidf(model, ds.docs[r]);
      std::copy(v.begin(), v.end(), tx.values.row(r).begin());
    }
    text_block = std::move(tx);
  } else if (ds.text_kind == TextFeatureKind::fixed) {
    text_block = *ds.text_fixed;
  }

  FeatureMatrix features;
  if (ds.acoustic && text_block)
    features = fusion::concat(*ds.acoustic, *text_block);
  else if (ds.acoustic)
    features = *ds.acoustic;
  else
    features = std::move(*text_block);

  if (ds.standardize) features = fusion::standardize(features, train_rows);
  return features;
}

std::vector<double> ClassifierResult::fold_scores(Averaging a) const {
  std::vector<double> out;
  for (const auto& run : runs)
    for (const auto& fs : run.folds)
      out.push_back(a == Averaging::macro ? fs.macro
                    : a == Averaging::weighted ? fs.weighted
                                               : fs.micro);
  return out;
}

namespace {

AveragingSummary summarize(const std::vector<RunResult>& runs, Averaging a) {
  auto pick = [a](const FoldScore& fs) {
    return a == Averaging::macro ? fs.macro
           : a == Averaging::weighted ? fs.weighted
                                      : fs.micro;
  };
  std::vector<double> run_means, fold_scores;
  for (const auto& run : runs) {
    run_means.push_back(pick(run.run_mean));
    for (const auto& fs : run.folds) fold_scores.push_back(pick(fs));
  }
  auto mean_std = [](const std::vector<double>& v) {
    double mean = 0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    double var = 0;
    for (double x : v) var += (x - mean) * (x - mean);
    var /= static_cast<double>(v.size());  // population std
    return std::pair<double, double>(mean, std::sqrt(var));
  };
  AveragingSummary s;
  std::tie(s.mean_runs, s.std_runs) = mean_std(run_means);
  std::tie(s.mean_folds, s.std_folds) = mean_std(fold_scores);
  return s;
}

}  // namespace

CvReport run_cv(const Dataset& ds, std::span<const models::ClassifierSpec> specs,
                const CvPlan& plan, unsigned threads) {
  ds.validate();
  if (plan.k < 2) throw Error::validation("cv plan: k must be >= 2");
  if (plan.runs < 1) throw Error::validation("cv plan: runs must be >= 1");
  if (specs.empty()) throw Error::validation("run_cv: no classifiers");
  if (plan.grouping == Grouping::by_interview && ds.group_ids.empty())
    throw Error::validation("run_cv: grouping=by_interview requires group ids");

  const size_t n = ds.sample_ids.size();
  const size_t n_specs = specs.size();
  const int k_classes = static_cast<int>(ds.class_names.size());

  // Fold assignments are fixed up front so they never depend on schedule.
  std::vector<std::vector<int>> fold_of_run(static_cast<size_t>(plan.runs));
  for (int r = 0; r < plan.runs; ++r) {
    const uint64_t seed = plan.base_seed + static_cast<uint64_t>(r);
    fold_of_run[static_cast<size_t>(r)] =
        plan.grouping == Grouping::none
            ? stratified_kfold(ds.labels, plan.k, seed)
            : stratified_group_kfold(ds.labels, ds.group_ids, plan.k, seed);
  }

  struct Slot {
    std::vector<FoldScore> fold_scores;      // per spec
    std::vector<std::vector<int>> preds;     // per spec, per test sample (local)
    std::vector<Matrix> scores;              // per spec, rows = test samples
    std::vector<size_t> test_rows;
  };
  std::vector<Slot> slots(static_cast<size_t>(plan.runs * plan.k));

  parallel_for(slots.size(), threads, [&](size_t task) {
    const int run = static_cast<int>(task) / plan.k;
    const int fold_id = static_cast<int>(task) % plan.k;
    const auto& folds = fold_of_run[static_cast<size_t>(run)];

    std::vector<size_t> train_rows, test_rows;
    for (size_t i = 0; i < n; ++i) {
      if (folds[i] == fold_id)
        test_rows.push_back(i);
      else
        train_rows.push_back(i);
    }
    if (test_rows.empty())
      throw Error::runtime("run_cv: empty fold " + std::to_string(fold_id));

    const FeatureMatrix features = build_fold_features(ds, train_rows);
    const Matrix x_train = features.values.take_rows(train_rows);
    const Matrix x_test = features.values.take_rows(test_rows);

    std::vector<int> y_train, y_test;
    for (size_t r : train_rows) y_train.push_back(ds.labels[r]);
    for (size_t r : test_rows) y_test.push_back(ds.labels[r]);

    Slot slot;
    slot.test_rows = std::move(test_rows);
    for (const auto& spec : specs) {
      const auto model = models::train(spec, x_train, y_train);
      auto preds = model.predict(x_test);
      auto scores = model.decision_scores(x_test);

      // Models trained inside a fold may not have seen every class; remap
      // their score columns onto the dataset-wide class list.
      Matrix full_scores(x_test.rows, static_cast<size_t>(k_classes), 0.0);
      const auto& trained_classes = model.classes();
      for (size_t c = 0; c < trained_classes.size(); ++c)
        for (size_t i = 0; i < x_test.rows; ++i)
          full_scores.at(i, static_cast<size_t>(trained_classes[c])) = scores.at(i, c);

      FoldScore fs;
      fs.macro = f1_score(y_test, preds, Averaging::macro, k_classes);
      fs.weighted = f1_score(y_test, preds, Averaging::weighted, k_classes);
      fs.micro = f1_score(y_test, preds, Averaging::micro, k_classes);
      fs.n_test = static_cast<int>(y_test.size());

      slot.fold_scores.push_back(fs);
      slot.preds.push_back(std::move(preds));
      slot.scores.push_back(std::move(full_scores));
    }
    slots[task] = std::move(slot);
  });

  // Single-owner assembly ordered by (spec, run, fold).
  CvReport report;
  report.plan = plan;
  report.dataset.n_samples = n;
  report.dataset.class_names = ds.class_names;
  report.dataset.class_counts.assign(static_cast<size_t>(k_classes), 0);
  for (int label : ds.labels) ++report.dataset.class_counts[static_cast<size_t>(label)];
  report.dataset.fingerprint = ds.fingerprint();
  report.dataset.acoustic_cols = ds.acoustic ? ds.acoustic->values.cols : 0;
  report.dataset.text_kind = ds.text_kind == TextFeatureKind::none ? "none"
                             : ds.text_kind == TextFeatureKind::tfidf ? "tfidf"
                                                                      : "fixed";
  report.dataset.standardize = ds.standardize;

  for (size_t s = 0; s < n_specs; ++s) {
    ClassifierResult cr;
    cr.spec = specs[s];
    for (int r = 0; r < plan.runs; ++r) {
      RunResult run;
      run.fold_seed = plan.base_seed + static_cast<uint64_t>(r);

      std::vector<int> oof_pred(n, -1);
      Matrix oof_scores(n, static_cast<size_t>(k_classes));
      for (int f = 0; f < plan.k; ++f) {
        const Slot& slot = slots[static_cast<size_t>(r * plan.k + f)];
        run.folds.push_back(slot.fold_scores[s]);
        for (size_t i = 0; i < slot.test_rows.size(); ++i) {
          const size_t row = slot.test_rows[i];
          oof_pred[row] = slot.preds[s][i];
          for (int c = 0; c < k_classes; ++c)
            oof_scores.at(row, static_cast<size_t>(c)) =
                slot.scores[s].at(i, static_cast<size_t>(c));
        }
      }
      for (int p : oof_pred)
        if (p < 0) throw Error::runtime("run_cv: a sample was never tested");

      run.confusion = confusion_matrix(ds.labels, oof_pred, k_classes);
      for (int c = 0; c < k_classes; ++c) {
        std::vector<double> class_scores(n);
        for (size_t i = 0; i < n; ++i)
          class_scores[i] = oof_scores.at(i, static_cast<size_t>(c));
        RocResult roc;
        roc.class_index = c;
        auto curve = roc_curve(ds.labels, class_scores, c);
        roc.auc = curve.auc;
        roc.points = std::move(curve.points);
        run.roc.push_back(std::move(roc));
      }

      FoldScore mean;
      for (const auto& fs : run.folds) {
        mean.macro += fs.macro;
        mean.weighted += fs.weighted;
        mean.micro += fs.micro;
        mean.n_test += fs.n_test;
      }
      mean.macro /= plan.k;
      mean.weighted /= plan.k;
      mean.micro /= plan.k;
      run.run_mean = mean;

      cr.runs.push_back(std::move(run));
    }
    cr.macro = summarize(cr.runs, Averaging::macro);
    cr.weighted = summarize(cr.runs, Averaging::weighted);
    cr.micro = summarize(cr.runs, Averaging::micro);
    report.classifiers.push_back(std::move(cr));
  }

  for (size_t a = 0; a < n_specs; ++a) {
    for (size_t b = a + 1; b < n_specs; ++b) {
      const auto sa = report.classifiers[a].fold_scores(Averaging::weighted);
      const auto sb = report.classifiers[b].fold_scores(Averaging::weighted);
      const auto t = t_test(sa, sb, /*paired=*/true);
      PairwiseTest pt;
      pt.kind_a = models::to_string(specs[a].kind);
      pt.kind_b = models::to_string(specs[b].kind);
      pt.t = t.t;
      pt.p = t.p;
      pt.significant = t.p < 0.05;
      report.pairwise.push_back(std::move(pt));
    }
  }
  return report;
}

// ---------------------------------------------------------------------------
// Report serialization.

namespace {

json fold_to_json(const FoldScore& fs) {
  return {{"macro", fs.macro}, {"weighted", fs.weighted}, {"micro", fs.micro},
          {"n_test", fs.n_test}};
}

FoldScore fold_from_json(const json& j) {
  FoldScore fs;
  fs.macro = j.at("macro").get<double>();
  fs.weighted = j.at("weighted").get<double>();
  fs.micro = j.at("micro").get<double>();
  fs.n_test = j.at("n_test").get<int>();
  return fs;
}

json summary_to_json(const AveragingSummary& s) {
  return {{"mean_runs", s.mean_runs}, {"std_runs", s.std_runs},
          {"mean_folds", s.mean_folds}, {"std_folds", s.std_folds}};
}

AveragingSummary summary_from_json(const json& j) {
  AveragingSummary s;
  s.mean_runs = j.at("mean_runs").get<double>();
  s.std_runs = j.at("std_runs").get<double>();
  s.mean_folds = j.at("mean_folds").get<double>();
  s.std_folds = j.at("std_folds").get<double>();
  return s;
}

}  // namespace

json CvReport::to_json() const {
  json j;
  j["format"] = "fmss-report";
  j["version"] = 1;
  j["plan"] = {{"k", plan.k},
               {"runs", plan.runs},
               {"base_seed", plan.base_seed},
               {"grouping", plan.grouping == Grouping::none ? "none" : "by_interview"}};
  j["dataset"] = {{"n_samples", dataset.n_samples},
                  {"class_names", dataset.class_names},
                  {"class_counts", dataset.class_counts},
                  {"fingerprint", dataset.fingerprint},
                  {"acoustic_cols", dataset.acoustic_cols},
                  {"text_kind", dataset.text_kind},
                  {"standardize", dataset.standardize}};

  json classifiers = json::array();
  for (const auto& cr : this->classifiers) {
    json cj;
    cj["kind"] = models::to_string(cr.spec.kind);
    cj["hyperparameters"] = cr.spec.hyperparameters_json();
    cj["summary"] = {{"macro", summary_to_json(cr.macro)},
                     {"weighted", summary_to_json(cr.weighted)},
                     {"micro", summary_to_json(cr.micro)}};
    json runs = json::array();
    for (const auto& run : cr.runs) {
      json rj;
      rj["fold_seed"] = run.fold_seed;
      json folds = json::array();
      for (const auto& fs : run.folds) folds.push_back(fold_to_json(fs));
      rj["folds"] = std::move(folds);
      rj["run_mean"] = fold_to_json(run.run_mean);
      json cm = json::array();
      for (size_t r = 0; r < run.confusion.rows; ++r) {
        json row = json::array();
        for (size_t c = 0; c < run.confusion.cols; ++c)
          row.push_back(static_cast<long long>(run.confusion.at(r, c)));
        cm.push_back(std::move(row));
      }
      rj["confusion"] = std::move(cm);
      json rocs = json::array();
      for (const auto& roc : run.roc) {
        json points = json::array();
        for (const auto& [fpr, tpr] : roc.points) points.push_back({fpr, tpr});
        rocs.push_back({{"class_index", roc.class_index}, {"auc", roc.auc},
                        {"points", std::move(points)}});
      }
      rj["roc"] = std::move(rocs);
      runs.push_back(std::move(rj));
    }
    cj["runs"] = std::move(runs);
    classifiers.push_back(std::move(cj));
  }
  j["classifiers"] = std::move(classifiers);

  json pw = json::array();
  for (const auto& pt : pairwise)
    pw.push_back({{"a", pt.kind_a}, {"b", pt.kind_b}, {"t", pt.t}, {"p", pt.p},
                  {"significant", pt.significant}});
  j["pairwise_tests"] = std::move(pw);
  j["warnings"] = warnings;
  j["config"] = config_echo.is_null() ? json::object() : config_echo;
  return j;
}

CvReport CvReport::from_json(const json& j) {
  if (j.value("format", "") != "fmss-report")
    throw Error::validation("report file: missing fmss-report format marker");
  if (j.value("version", 0) != 1)
    throw Error::validation("report file: unsupported version");

  CvReport report;
  const json& plan = j.at("plan");
  report.plan.k = plan.at("k").get<int>();
  report.plan.runs = plan.at("runs").get<int>();
  report.plan.base_seed = plan.at("base_seed").get<uint64_t>();
  report.plan.grouping =
      plan.at("grouping").get<std::string>() == "none" ? Grouping::none : Grouping::by_interview;

  const json& ds = j.at("dataset");
  report.dataset.n_samples = ds.at("n_samples").get<size_t>();
  report.dataset.class_names = ds.at("class_names").get<std::vector<std::string>>();
  report.dataset.class_counts = ds.at("class_counts").get<std::vector<int>>();
  report.dataset.fingerprint = ds.at("fingerprint").get<uint64_t>();
  report.dataset.acoustic_cols = ds.at("acoustic_cols").get<size_t>();
  report.dataset.text_kind = ds.at("text_kind").get<std::string>();
  report.dataset.standardize = ds.at("standardize").get<bool>();

  for (const auto& cj : j.at("classifiers")) {
    ClassifierResult cr;
    json spec_json = cj.at("hyperparameters");
    spec_json["kind"] = cj.at("kind");
    spec_json.erase("multiclass");
    spec_json.erase("loss");
    spec_json.erase("metric");
    spec_json.erase("criterion");
    spec_json.erase("max_features");
    cr.spec = models::ClassifierSpec::from_json(spec_json);
    cr.macro = summary_from_json(cj.at("summary").at("macro"));
    cr.weighted = summary_from_json(cj.at("summary").at("weighted"));
    cr.micro = summary_from_json(cj.at("summary").at("micro"));
    for (const auto& rj : cj.at("runs")) {
      RunResult run;
      run.fold_seed = rj.at("fold_seed").get<uint64_t>();
      for (const auto& fj : rj.at("folds")) run.folds.push_back(fold_from_json(fj));
      run.run_mean = fold_from_json(rj.at("run_mean"));
      const auto& cm = rj.at("confusion");
      run.confusion = Matrix(cm.size(), cm.empty() ? 0 : cm[0].size());
      for (size_t r = 0; r < cm.size(); ++r)
        for (size_t c = 0; c < cm[r].size(); ++c)
          run.confusion.at(r, c) = cm[r][c].get<double>();
      for (const auto& rocj : rj.at("roc")) {
        RocResult roc;
        roc.class_index = rocj.at("class_index").get<int>();
        roc.auc = rocj.at("auc").get<double>();
        for (const auto& pt : rocj.at("points"))
          roc.points.emplace_back(pt[0].get<double>(), pt[1].get<double>());
        run.roc.push_back(std::move(roc));
      }
      cr.runs.push_back(std::move(run));
    }
    report.classifiers.push_back(std::move(cr));
  }

  for (const auto& pj : j.at("pairwise_tests")) {
    PairwiseTest pt;
    pt.kind_a = pj.at("a").get<std::string>();
    pt.kind_b = pj.at("b").get<std::string>();
    pt.t = pj.at("t").get<double>();
    pt.p = pj.at("p").get<double>();
    pt.significant = pj.at("significant").get<bool>();
    report.pairwise.push_back(std::move(pt));
  }
  report.warnings = j.at("warnings").get<std::vector<std::string>>();
  report.config_echo = j.at("config");
  return report;
}

void CvReport::save(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw Error::runtime("cannot write report: " + path.string());
  out << to_json().dump(2) << '\n';
  if (!out) throw Error::runtime("write failed: " + path.string());
}

CvReport CvReport::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error::validation("cannot open report: " + path.string());
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded())
    throw Error::validation("report file is not valid json: " + path.string());
  return from_json(j);
}

}  // namespace fmss::eval
