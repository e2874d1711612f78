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

#include "fmss/experiment.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <set>

#include "fmss/error.hpp"
#include "fmss/fusion.hpp"
#include "fmss/textfeat.hpp"
#include "fmss/util.hpp"

namespace fmss::exp {

using nlohmann::json;

std::string AcousticChoice::to_string() const {
  switch (kind) {
    case Kind::lite: return "lite";
    case Kind::none: return "none";
    case Kind::import_csv: return "import:" + import_path;
  }
  return "?";
}

AcousticChoice AcousticChoice::parse(const std::string& s) {
  AcousticChoice c;
  if (s == "lite") {
    c.kind = Kind::lite;
  } else if (s == "none") {
    c.kind = Kind::none;
  } else if (s.rfind("import:", 0) == 0) {
    c.kind = Kind::import_csv;
    c.import_path = s.substr(7);
    if (c.import_path.empty())
      throw Error::validation("acoustic choice 'import:' needs a csv path");
  } else {
    throw Error::validation("unknown acoustic choice '" + s +
                            "' (expected lite | import:<csv> | none)");
  }
  return c;
}

std::string TextChoice::to_string() const {
  switch (kind) {
    case Kind::tfidf: return "tfidf";
    case Kind::tfidf_pun: return "tfidf-pun";
    case Kind::none: return "none";
    case Kind::embedding: return "embedding:" + path;
    case Kind::import_csv: return "import:" + path;
  }
  return "?";
}

TextChoice TextChoice::parse(const std::string& s) {
  TextChoice c;
  if (s == "tfidf") {
    c.kind = Kind::tfidf;
  } else if (s == "tfidf-pun") {
    c.kind = Kind::tfidf_pun;
  } else if (s == "none") {
    c.kind = Kind::none;
  } else if (s.rfind("embedding:", 0) == 0) {
    c.kind = Kind::embedding;
    c.path = s.substr(10);
    if (c.path.empty()) throw Error::validation("text choice 'embedding:' needs a path");
  } else if (s.rfind("import:", 0) == 0) {
    c.kind = Kind::import_csv;
    c.path = s.substr(7);
    if (c.path.empty()) throw Error::validation("text choice 'import:' needs a csv path");
  } else {
    throw Error::validation("unknown text choice '" + s +
                            "' (expected tfidf | tfidf-pun | embedding:<file> | "
                            "import:<csv> | none)");
  }
  return c;
}

std::vector<models::ClassifierSpec> Manifest::default_classifiers() {
  std::vector<models::ClassifierSpec> specs(4);
  specs[0].kind = models::ModelKind::logreg;
  specs[1].kind = models::ModelKind::linsvc;
  specs[2].kind = models::ModelKind::rforest;
  specs[3].kind = models::ModelKind::knn;
  return specs;
}

namespace {

std::string resolve_path(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  if (path.is_absolute() || base.empty()) return path.string();
  return (base / path).lexically_normal().string();
}

}  // namespace

Manifest Manifest::from_json(const json& j, const std::filesystem::path& base_dir) {
  if (!j.is_object()) throw Error::validation("manifest: expected a json object");

  static const std::set<std::string> known = {
      "corpus_dir", "merge_scheme", "acoustic", "text", "standardize", "classifiers",
      "cv", "output_dir", "threads", "frame"};
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!known.count(it.key()))
      throw Error::validation("manifest: unknown field '" + it.key() + "'");

  Manifest m;
  if (!j.contains("corpus_dir") || !j["corpus_dir"].is_string())
    throw Error::validation("manifest: 'corpus_dir' (string) is required");
  m.corpus_dir = resolve_path(base_dir, j["corpus_dir"].get<std::string>());

  if (j.contains("merge_scheme")) m.merge_scheme = j["merge_scheme"].get<std::string>();
  corpus::MergeScheme::parse(m.merge_scheme);  // validate early

  if (j.contains("acoustic")) m.acoustic = AcousticChoice::parse(j["acoustic"].get<std::string>());
  if (m.acoustic.kind == AcousticChoice::Kind::import_csv)
    m.acoustic.import_path = resolve_path(base_dir, m.acoustic.import_path);

  if (j.contains("text")) m.text = TextChoice::parse(j["text"].get<std::string>());
  if (m.text.kind == TextChoice::Kind::embedding || m.text.kind == TextChoice::Kind::import_csv)
    m.text.path = resolve_path(base_dir, m.text.path);

  if (m.acoustic.kind == AcousticChoice::Kind::none && m.text.kind == TextChoice::Kind::none)
    throw Error::validation("manifest: acoustic and text cannot both be 'none'");

  if (j.contains("standardize")) m.standardize = j["standardize"].get<bool>();

  if (j.contains("classifiers")) {
    if (!j["classifiers"].is_array() || j["classifiers"].empty())
      throw Error::validation("manifest: 'classifiers' must be a non-empty array");
    for (const auto& cj : j["classifiers"])
      m.classifiers.push_back(models::ClassifierSpec::from_json(cj));
  } else {
    m.classifiers = default_classifiers();
  }

  if (j.contains("cv")) {
    const json& cv = j["cv"];
    static const std::set<std::string> cv_known = {"k", "runs", "base_seed", "grouping"};
    for (auto it = cv.begin(); it != cv.end(); ++it)
      if (!cv_known.count(it.key()))
        throw Error::validation("manifest: unknown cv field '" + it.key() + "'");
    if (cv.contains("k")) m.plan.k = cv["k"].get<int>();
    if (cv.contains("runs")) m.plan.runs = cv["runs"].get<int>();
    if (cv.contains("base_seed")) m.plan.base_seed = cv["base_seed"].get<uint64_t>();
    if (cv.contains("grouping")) {
      const std::string g = cv["grouping"].get<std::string>();
      if (g == "none")
        m.plan.grouping = eval::Grouping::none;
      else if (g == "by_interview")
        m.plan.grouping = eval::Grouping::by_interview;
      else
        throw Error::validation("manifest: grouping must be none | by_interview");
    }
  }
  if (m.plan.k < 2) throw Error::validation("manifest: cv.k must be >= 2");
  if (m.plan.runs < 1) throw Error::validation("manifest: cv.runs must be >= 1");

  if (j.contains("output_dir"))
    m.output_dir = resolve_path(base_dir, j["output_dir"].get<std::string>());
  else
    m.output_dir = resolve_path(base_dir, "out");

  if (j.contains("threads")) m.threads = j["threads"].get<unsigned>();

  if (j.contains("frame")) {
    const json& f = j["frame"];
    static const std::set<std::string> frame_known = {"window_s", "hop_s", "window_fn"};
    for (auto it = f.begin(); it != f.end(); ++it)
      if (!frame_known.count(it.key()))
        throw Error::validation("manifest: unknown frame field '" + it.key() + "'");
    if (f.contains("window_s")) m.frame.window_s = f["window_s"].get<double>();
    if (f.contains("hop_s")) m.frame.hop_s = f["hop_s"].get<double>();
    if (f.contains("window_fn")) {
      const std::string w = f["window_fn"].get<std::string>();
      if (w == "hamming")
        m.frame.window_fn = acoustic::WindowFn::hamming;
      else if (w == "hann")
        m.frame.window_fn = acoustic::WindowFn::hann;
      else
        throw Error::validation("manifest: window_fn must be hamming | hann");
    }
    if (m.frame.hop_s <= 0 || m.frame.hop_s > m.frame.window_s)
      throw Error::validation("manifest: require 0 < hop_s <= window_s");
  }
  return m;
}

Manifest Manifest::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error::validation("cannot open manifest: " + path.string());
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded())
    throw Error::validation("manifest is not valid json: " + path.string());
  return from_json(j, path.parent_path());
}

json Manifest::resolved() const {
  json specs = json::array();
  for (const auto& spec : classifiers) {
    json s = spec.hyperparameters_json();
    s["kind"] = models::to_string(spec.kind);
    specs.push_back(std::move(s));
  }
  return json{
      {"corpus_dir", corpus_dir},
      {"merge_scheme", merge_scheme},
      {"acoustic", acoustic.to_string()},
      {"text", text.to_string()},
      {"standardize", standardize},
      {"classifiers", std::move(specs)},
      {"cv",
       {{"k", plan.k},
        {"runs", plan.runs},
        {"base_seed", plan.base_seed},
        {"grouping", plan.grouping == eval::Grouping::none ? "none" : "by_interview"}}},
      {"output_dir", output_dir},
      {"threads", threads},
      {"frame",
       {{"window_s", frame.window_s},
        {"hop_s", frame.hop_s},
        {"window_fn", frame.window_fn == acoustic::WindowFn::hamming ? "hamming" : "hann"}}},
  };
}

void Manifest::validate_paths() const {
  namespace fs = std::filesystem;
  if (!fs::is_directory(corpus_dir))
    throw Error::validation("manifest: corpus_dir does not exist: " + corpus_dir);
  if (acoustic.kind == AcousticChoice::Kind::import_csv && !fs::exists(acoustic.import_path))
    throw Error::validation("manifest: acoustic import csv missing: " + acoustic.import_path);
  if ((text.kind == TextChoice::Kind::embedding || text.kind == TextChoice::Kind::import_csv) &&
      !fs::exists(text.path))
    throw Error::validation("manifest: text resource missing: " + text.path);
}

eval::Dataset build_dataset(const Manifest& m, std::vector<std::string>* warnings) {
  const auto scheme = corpus::MergeScheme::parse(m.merge_scheme);
  const auto corpus = corpus::load_corpus(m.corpus_dir, scheme);
  if (warnings)
    warnings->insert(warnings->end(), corpus.warnings.begin(), corpus.warnings.end());

  eval::Dataset ds;
  ds.class_names = {"low", "moderate", "high"};
  for (const auto& sample : corpus.samples) {
    ds.sample_ids.push_back(sample.sample_id);
    ds.labels.push_back(static_cast<int>(sample.label3));
    ds.group_ids.push_back(sample.source_interview);
  }

  switch (m.acoustic.kind) {
    case AcousticChoice::Kind::lite: {
      acoustic::LiteOptions opt;
      opt.frame = m.frame;
      opt.threads = m.threads;
      ds.acoustic = acoustic::extract_lite_features(corpus, opt, warnings);
      break;
    }
    case AcousticChoice::Kind::import_csv: {
      auto fm = import_features(m.acoustic.import_path);
      // Reorder imported rows onto the corpus sample order.
      std::vector<size_t> order;
      for (const auto& id : ds.sample_ids) order.push_back(fm.index_of(id));
      FeatureMatrix aligned;
      aligned.sample_ids = ds.sample_ids;
      aligned.feature_names = fm.feature_names;
      aligned.values = fm.values.take_rows(order);
      ds.acoustic = std::move(aligned);
      break;
    }
    case AcousticChoice::Kind::none:
      break;
  }

  auto concat_sample_text = [&](const corpus::TwinSample& sample) {
    std::string text;
    for (const auto& u : sample.caregiver_utterances) {
      if (!text.empty()) text += ' ';
      text += u.text;
    }
    return text;
  };

  switch (m.text.kind) {
    case TextChoice::Kind::tfidf:
    case TextChoice::Kind::tfidf_pun: {
      ds.text_kind = eval::TextFeatureKind::tfidf;
      const auto variant = m.text.kind == TextChoice::Kind::tfidf
                               ? text::TokenVariant::stripped
                               : text::TokenVariant::with_punctuation;
      for (const auto& sample : corpus.samples)
        ds.docs.push_back(text::preprocess(concat_sample_text(sample), variant));
      break;
    }
    case TextChoice::Kind::embedding: {
      ds.text_kind = eval::TextFeatureKind::fixed;
      const auto table = text::load_embeddings(m.text.path);
      FeatureMatrix tx;
      tx.sample_ids = ds.sample_ids;
      for (size_t d = 0; d < table.dimension; ++d)
        tx.feature_names.push_back("emb" + std::to_string(d));
      tx.values = Matrix(ds.sample_ids.size(), table.dimension);
      for (size_t i = 0; i < corpus.samples.size(); ++i) {
        const auto doc = text::preprocess(concat_sample_text(corpus.samples[i]),
                                          text::TokenVariant::stripped);
        const auto v = text::embed_document(doc, table);
        std::copy(v.begin(), v.end(), tx.values.row(i).begin());
      }
      ds.text_fixed = std::move(tx);
      break;
    }
    case TextChoice::Kind::import_csv: {
      ds.text_kind = eval::TextFeatureKind::fixed;
      auto fm = import_features(m.text.path);
      std::vector<size_t> order;
      for (const auto& id : ds.sample_ids) order.push_back(fm.index_of(id));
      FeatureMatrix aligned;
      aligned.sample_ids = ds.sample_ids;
      aligned.feature_names = fm.feature_names;
      aligned.values = fm.values.take_rows(order);
      ds.text_fixed = std::move(aligned);
      break;
    }
    case TextChoice::Kind::none:
      break;
  }

  ds.standardize = m.standardize;
  ds.validate();
  return ds;
}

eval::CvReport run_experiment(const Manifest& m) {
  m.validate_paths();

  std::vector<std::string> warnings;
  const auto ds = build_dataset(m, &warnings);
  auto report = eval::run_cv(ds, m.classifiers, m.plan, m.threads);
  report.warnings = warnings;
  report.config_echo = m.resolved();

  write_report_artifacts(report, m.output_dir);
  return report;
}

// ---------------------------------------------------------------------------
// Rendering.

namespace {

std::string pct(double v, double std_dev) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.1f(%.1f)", 100.0 * v, 100.0 * std_dev);
  return buf;
}

void write_confusion_csv(const eval::CvReport& report, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error::runtime("cannot write " + path.string());
  out << "classifier,run,true_class";
  for (const auto& name : report.dataset.class_names) out << ",pred_" << name;
  out << '\n';
  for (const auto& cr : report.classifiers) {
    for (size_t r = 0; r < cr.runs.size(); ++r) {
      const auto& cm = cr.runs[r].confusion;
      for (size_t i = 0; i < cm.rows; ++i) {
        out << models::to_string(cr.spec.kind) << ',' << r << ','
            << report.dataset.class_names[i];
        for (size_t j = 0; j < cm.cols; ++j)
          out << ',' << static_cast<long long>(cm.at(i, j));
        out << '\n';
      }
    }
  }
}

void write_roc_csv(const eval::CvReport& report, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error::runtime("cannot write " + path.string());
  out << "classifier,run,class,fpr,tpr\n";
  for (const auto& cr : report.classifiers)
    for (size_t r = 0; r < cr.runs.size(); ++r)
      for (const auto& roc : cr.runs[r].roc)
        for (const auto& [fpr, tpr] : roc.points)
          out << models::to_string(cr.spec.kind) << ',' << r << ','
              << report.dataset.class_names[static_cast<size_t>(roc.class_index)] << ','
              << format_double(fpr) << ',' << format_double(tpr) << '\n';
}

std::string svg_header(int w, int h) {
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%d\" height=\"%d\" "
                "viewBox=\"0 0 %d %d\" font-family=\"sans-serif\">\n",
                w, h, w, h);
  return buf;
}

// Confusion heatmap for run 0 of one classifier.
void write_confusion_svg(const eval::CvReport& report, size_t classifier_index,
                         const std::filesystem::path& path) {
  const auto& cr = report.classifiers[classifier_index];
  const auto& cm = cr.runs[0].confusion;
  const auto& names = report.dataset.class_names;
  const int cell = 90, margin = 110, top = 60;
  const int w = margin + cell * static_cast<int>(cm.cols) + 30;
  const int h = top + cell * static_cast<int>(cm.rows) + 60;

  double max_v = 1;
  for (double v : cm.data) max_v = std::max(max_v, v);

  std::ofstream out(path);
  if (!out) throw Error::runtime("cannot write " + path.string());
  out << svg_header(w, h);
  out << "<text x=\"" << w / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">"
      << "Confusion matrix (run 0, " << models::to_string(cr.spec.kind) << ")</text>\n";
  for (size_t i = 0; i < cm.rows; ++i) {
    out << "<text x=\"" << margin - 10 << "\" y=\"" << top + cell * (int)i + cell / 2 + 5
        << "\" text-anchor=\"end\" font-size=\"13\">" << names[i] << "</text>\n";
    for (size_t j = 0; j < cm.cols; ++j) {
      const double v = cm.at(i, j);
      const int shade = 255 - static_cast<int>(195.0 * v / max_v);
      out << "<rect x=\"" << margin + cell * (int)j << "\" y=\"" << top + cell * (int)i
          << "\" width=\"" << cell << "\" height=\"" << cell << "\" fill=\"rgb(" << shade
          << ',' << shade << ",255)\" stroke=\"#444\"/>\n";
      out << "<text x=\"" << margin + cell * (int)j + cell / 2 << "\" y=\""
          << top + cell * (int)i + cell / 2 + 5
          << "\" text-anchor=\"middle\" font-size=\"14\">" << static_cast<long long>(v)
          << "</text>\n";
    }
  }
  for (size_t j = 0; j < cm.cols; ++j)
    out << "<text x=\"" << margin + cell * (int)j + cell / 2 << "\" y=\""
        << top + cell * (int)cm.rows + 25 << "\" text-anchor=\"middle\" font-size=\"13\">"
        << names[j] << "</text>\n";
  out << "<text x=\"" << margin + cell * (int)cm.cols / 2 << "\" y=\""
      << top + cell * (int)cm.rows + 48
      << "\" text-anchor=\"middle\" font-size=\"13\">predicted</text>\n";
  out << "</svg>\n";
}

// One-vs-rest ROC curves for run 0 of one classifier.
void write_roc_svg(const eval::CvReport& report, size_t classifier_index,
                   const std::filesystem::path& path) {
  const auto& cr = report.classifiers[classifier_index];
  const auto& names = report.dataset.class_names;
  const int size = 360, margin = 55;
  const int w = size + margin + 160, h = size + 2 * margin;
  const char* colors[] = {"#c0392b", "#2471a3", "#1e8449", "#8e44ad", "#b7950b"};

  auto sx = [&](double fpr) { return margin + fpr * size; };
  auto sy = [&](double tpr) { return margin + size - tpr * size; };

  std::ofstream out(path);
  if (!out) throw Error::runtime("cannot write " + path.string());
  out << svg_header(w, h);
  out << "<text x=\"" << (margin + size / 2) << "\" y=\"24\" text-anchor=\"middle\" "
      << "font-size=\"15\">ROC (run 0, " << models::to_string(cr.spec.kind) << ")</text>\n";
  out << "<rect x=\"" << margin << "\" y=\"" << margin << "\" width=\"" << size
      << "\" height=\"" << size << "\" fill=\"none\" stroke=\"#333\"/>\n";
  out << "<line x1=\"" << sx(0) << "\" y1=\"" << sy(0) << "\" x2=\"" << sx(1) << "\" y2=\""
      << sy(1) << "\" stroke=\"#999\" stroke-dasharray=\"5,5\"/>\n";

  for (const auto& roc : cr.runs[0].roc) {
    out << "<polyline fill=\"none\" stroke=\""
        << colors[static_cast<size_t>(roc.class_index) % 5] << "\" stroke-width=\"2\" points=\"";
    for (const auto& [fpr, tpr] : roc.points) out << sx(fpr) << ',' << sy(tpr) << ' ';
    out << "\"/>\n";
    char label[128];
    std::snprintf(label, sizeof(label), "%s (AUC %.4f)",
                  names[static_cast<size_t>(roc.class_index)].c_str(), roc.auc);
    out << "<text x=\"" << margin + size + 12 << "\" y=\""
        << margin + 24 + 22 * roc.class_index << "\" font-size=\"13\" fill=\""
        << colors[static_cast<size_t>(roc.class_index) % 5] << "\">" << label << "</text>\n";
  }
  out << "<text x=\"" << margin + size / 2 << "\" y=\"" << h - 14
      << "\" text-anchor=\"middle\" font-size=\"13\">false positive rate</text>\n";
  out << "<text x=\"18\" y=\"" << margin + size / 2
      << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 18 "
      << margin + size / 2 << ")\">true positive rate</text>\n";
  out << "</svg>\n";
}

}  // namespace

std::string render_report_text(const eval::CvReport& report) {
  std::string out;
  char line[256];

  out += "cross-validated results (" + std::to_string(report.plan.runs) + " runs x " +
         std::to_string(report.plan.k) + "-fold, base seed " +
         std::to_string(report.plan.base_seed) + ")\n";
  out += "samples: " + std::to_string(report.dataset.n_samples) + " [";
  for (size_t c = 0; c < report.dataset.class_names.size(); ++c) {
    if (c) out += ", ";
    out += report.dataset.class_names[c] + "=" +
           std::to_string(report.dataset.class_counts[c]);
  }
  out += "]\n";
  out += "features: acoustic_cols=" + std::to_string(report.dataset.acoustic_cols) +
         " text=" + report.dataset.text_kind +
         (report.dataset.standardize ? " standardized" : "") + "\n\n";

  out += "F1 mean(std) in percent; runs = over run means, folds = over all fold scores\n";
  std::snprintf(line, sizeof(line), "%-9s %-18s %-18s %-18s\n", "clf", "weighted[runs]",
                "macro[runs]", "micro[runs]");
  out += line;
  for (const auto& cr : report.classifiers) {
    std::snprintf(line, sizeof(line), "%-9s %-18s %-18s %-18s\n",
                  models::to_string(cr.spec.kind),
                  pct(cr.weighted.mean_runs, cr.weighted.std_runs).c_str(),
                  pct(cr.macro.mean_runs, cr.macro.std_runs).c_str(),
                  pct(cr.micro.mean_runs, cr.micro.std_runs).c_str());
    out += line;
  }
  out += "\n";
  std::snprintf(line, sizeof(line), "%-9s %-18s %-18s\n", "clf", "weighted[folds]",
                "aucs[run0]");
  out += line;
  for (const auto& cr : report.classifiers) {
    std::string aucs;
    for (const auto& roc : cr.runs[0].roc) {
      char b[32];
      std::snprintf(b, sizeof(b), "%s%.3f", aucs.empty() ? "" : "/", roc.auc);
      aucs += b;
    }
    std::snprintf(line, sizeof(line), "%-9s %-18s %-18s\n", models::to_string(cr.spec.kind),
                  pct(cr.weighted.mean_folds, cr.weighted.std_folds).c_str(), aucs.c_str());
    out += line;
  }

  if (!report.pairwise.empty()) {
    out += "\npairwise paired t-tests on weighted fold F1 (alpha 0.05)\n";
    for (const auto& pt : report.pairwise) {
      std::snprintf(line, sizeof(line), "  %-9s vs %-9s t=%+.3f p=%.4f %s\n",
                    pt.kind_a.c_str(), pt.kind_b.c_str(), pt.t, pt.p,
                    pt.significant ? "*" : "");
      out += line;
    }
  }
  if (!report.warnings.empty()) {
    out += "\nwarnings:\n";
    for (const auto& warning : report.warnings) out += "  " + warning + "\n";
  }
  return out;
}

void write_report_artifacts(const eval::CvReport& report,
                            const std::filesystem::path& out_dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (!fs::is_directory(out_dir))
    throw Error::runtime("cannot create output directory: " + out_dir.string());

  report.save(out_dir / "report.json");
  {
    std::ofstream txt(out_dir / "report.txt");
    if (!txt) throw Error::runtime("cannot write report.txt");
    txt << render_report_text(report);
  }
  {
    std::ofstream mf(out_dir / "resolved_manifest.json");
    if (!mf) throw Error::runtime("cannot write resolved_manifest.json");
    mf << report.config_echo.dump(2) << '\n';
  }
  write_confusion_csv(report, out_dir / "confusion.csv");
  write_roc_csv(report, out_dir / "roc.csv");
  // Plots for the headline classifier: best weighted mean over runs.
  size_t best = 0;
  for (size_t i = 1; i < report.classifiers.size(); ++i)
    if (report.classifiers[i].weighted.mean_runs > report.classifiers[best].weighted.mean_runs)
      best = i;
  write_confusion_svg(report, best, out_dir / "confusion.svg");
  write_roc_svg(report, best, out_dir / "roc.svg");
}

std::vector<CompareRow> compare_reports(const eval::CvReport& a, const eval::CvReport& b,
                                        bool paired) {
  if (a.plan.k != b.plan.k || a.plan.runs != b.plan.runs ||
      a.plan.base_seed != b.plan.base_seed || a.plan.grouping != b.plan.grouping)
    throw Error::validation("compare: cv plans differ (k/runs/base_seed/grouping)");
  if (paired && a.dataset.fingerprint != b.dataset.fingerprint)
    throw Error::validation(
        "compare: datasets differ, fold partitions are not shared; rerun with matching "
        "corpora or use the unpaired test");

  std::vector<CompareRow> rows;
  for (const auto& ca : a.classifiers) {
    const std::string kind = models::to_string(ca.spec.kind);
    const eval::ClassifierResult* cb = nullptr;
    for (const auto& c : b.classifiers)
      if (models::to_string(c.spec.kind) == kind) {
        cb = &c;
        break;
      }
    if (!cb) continue;

    const auto sa = ca.fold_scores(eval::Averaging::weighted);
    const auto sb = cb->fold_scores(eval::Averaging::weighted);
    const auto t = eval::t_test(sa, sb, paired);
    CompareRow row;
    row.kind = kind;
    row.mean_a = ca.weighted.mean_runs;
    row.mean_b = cb->weighted.mean_runs;
    row.t = t.t;
    row.p = t.p;
    row.significant = t.p < 0.05;
    rows.push_back(row);
  }
  if (rows.empty())
    throw Error::validation("compare: the reports share no classifier kinds");
  return rows;
}

std::string render_compare_text(const std::vector<CompareRow>& rows) {
  std::string out = "per-classifier significance (weighted fold F1, alpha 0.05)\n";
  char line[160];
  std::snprintf(line, sizeof(line), "%-9s %-10s %-10s %-9s %-9s\n", "clf", "mean_a", "mean_b",
                "t", "p");
  out += line;
  for (const auto& r : rows) {
    std::snprintf(line, sizeof(line), "%-9s %-10.4f %-10.4f %+-9.3f %-9.4f %s\n",
                  r.kind.c_str(), r.mean_a, r.mean_b, r.t, r.p, r.significant ? "*" : "");
    out += line;
  }
  return out;
}

}  // namespace fmss::exp
