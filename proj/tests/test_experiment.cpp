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

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "doctest.h"
#include "json.hpp"

#include "fmss/error.hpp"
#include "fmss/experiment.hpp"
#include "fmss/synth.hpp"

namespace fs = std::filesystem;
using namespace fmss;
using namespace fmss::exp;
using nlohmann::json;

namespace {

fs::path temp_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "fmss_tests" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

fs::path make_corpus(const std::string& name, int n, bool audio, uint64_t seed = 3,
                     double signal = 1.0) {
  const auto dir = temp_dir(name);
  synth::SynthConfig cfg;
  cfg.n_interviews = n;
  cfg.seed = seed;
  cfg.signal_strength = signal;
  cfg.write_audio = audio;
  // Flatter priors so tiny corpora still contain all three classes.
  cfg.class_priors = {0.2, 0.2, 0.15, 0.15, 0.15, 0.15};
  synth::generate_corpus(cfg, dir);
  return dir;
}

std::string file_text(const fs::path& path) {
  std::ifstream in(path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(FMSS_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

}  // namespace

TEST_CASE("manifest parsing applies and echoes defaults") {
  const auto corpus = make_corpus("manifest_defaults", 6, false);
  json j = {{"corpus_dir", corpus.string()}, {"text", "tfidf"}, {"acoustic", "none"}};
  const auto m = Manifest::from_json(j, "");

  CHECK(m.plan.k == 5);
  CHECK(m.plan.runs == 5);
  CHECK(m.plan.base_seed == 42);
  CHECK(m.classifiers.size() == 4);
  CHECK(m.merge_scheme == "0,1=low;2,3=moderate;4,5=high");

  const auto echo = m.resolved();
  for (const char* key : {"corpus_dir", "merge_scheme", "acoustic", "text", "standardize",
                          "classifiers", "cv", "output_dir", "threads", "frame"})
    CHECK(echo.contains(key));
  CHECK(echo["frame"]["window_s"] == 0.025);
}

TEST_CASE("manifest rejects unknown fields and contradictory choices") {
  json j = {{"corpus_dir", "x"}, {"typo_field", 1}};
  CHECK_THROWS_WITH_AS(Manifest::from_json(j, ""), doctest::Contains("typo_field"), Error);

  json both_none = {{"corpus_dir", "x"}, {"acoustic", "none"}, {"text", "none"}};
  CHECK_THROWS_AS(Manifest::from_json(both_none, ""), Error);

  json bad_cv = {{"corpus_dir", "x"}, {"cv", {{"k", 1}}}};
  CHECK_THROWS_AS(Manifest::from_json(bad_cv, ""), Error);

  json bad_group = {{"corpus_dir", "x"}, {"cv", {{"grouping", "sideways"}}}};
  CHECK_THROWS_AS(Manifest::from_json(bad_group, ""), Error);

  json bad_clf = {{"corpus_dir", "x"}, {"classifiers", json::array({{{"kind", "svm9000"}}})}};
  CHECK_THROWS_AS(Manifest::from_json(bad_clf, ""), Error);
}

TEST_CASE("text-only experiment writes the full artifact set deterministically") {
  const auto corpus = make_corpus("exp_text_only", 10, false);
  const auto out = temp_dir("exp_text_only_out");

  Manifest m;
  m.corpus_dir = corpus.string();
  m.acoustic = AcousticChoice::parse("none");
  m.text = TextChoice::parse("tfidf-pun");
  m.output_dir = out.string();
  m.plan.runs = 5;
  m.plan.k = 5;

  const auto report = run_experiment(m);
  CHECK(report.classifiers.size() == 4);
  for (const auto& cr : report.classifiers)
    CHECK(cr.fold_scores(eval::Averaging::weighted).size() == 25);

  for (const char* artifact : {"report.json", "report.txt", "resolved_manifest.json",
                               "confusion.csv", "roc.csv", "confusion.svg", "roc.svg"})
    CHECK(fs::exists(out / artifact));

  const std::string first = file_text(out / "report.json");
  run_experiment(m);
  CHECK(file_text(out / "report.json") == first);
}

TEST_CASE("embedding text features run end to end") {
  const auto corpus = make_corpus("exp_embed", 8, false);
  const auto dir = temp_dir("exp_embed_vectors");
  {
    std::ofstream vec(dir / "vectors.txt");
    vec << "lovely 1 0 0\nwarm 0.9 0 0.1\ndifficult -1 0 0\ncross -0.8 0.1 0\n"
           "okay 0 1 0\nfine 0.1 0.9 0\nthe 0 0 0.2\nand 0 0 0.1\n";
  }

  Manifest m;
  m.corpus_dir = corpus.string();
  m.acoustic = AcousticChoice::parse("none");
  m.text = TextChoice::parse("embedding:" + (dir / "vectors.txt").string());
  m.output_dir = temp_dir("exp_embed_out").string();
  m.plan.runs = 2;
  m.plan.k = 3;

  const auto report = run_experiment(m);
  CHECK(report.dataset.text_kind == "fixed");
  CHECK(report.classifiers[0].fold_scores(eval::Averaging::weighted).size() == 6);
}

TEST_CASE("feature csv import path aligns rows by sample id") {
  const auto corpus = make_corpus("exp_import", 6, false);
  // Build an importable matrix via the dataset builder, then shuffle rows.
  Manifest probe;
  probe.corpus_dir = corpus.string();
  probe.acoustic = AcousticChoice::parse("none");
  probe.text = TextChoice::parse("tfidf");
  auto ds = build_dataset(probe, nullptr);

  FeatureMatrix fm;
  fm.feature_names = {"v0", "v1"};
  for (size_t i = ds.sample_ids.size(); i-- > 0;) fm.sample_ids.push_back(ds.sample_ids[i]);
  fm.values = Matrix(fm.sample_ids.size(), 2);
  for (size_t r = 0; r < fm.values.rows; ++r) fm.values.at(r, 0) = static_cast<double>(r);
  const auto dir = temp_dir("exp_import_csv");
  export_features(fm, dir / "tx.csv");

  Manifest m;
  m.corpus_dir = corpus.string();
  m.acoustic = AcousticChoice::parse("none");
  m.text = TextChoice::parse("import:" + (dir / "tx.csv").string());
  const auto aligned = build_dataset(m, nullptr);
  REQUIRE(aligned.text_fixed.has_value());
  CHECK(aligned.text_fixed->sample_ids == ds.sample_ids);
  // Reversed source rows land on their ids, not their file positions.
  CHECK(aligned.text_fixed->values.at(0, 0) ==
        static_cast<double>(ds.sample_ids.size() - 1));
}

TEST_CASE("missing wav files surface as runtime errors naming the file") {
  const auto corpus = make_corpus("exp_missing_wav", 4, false);  // no audio written
  Manifest m;
  m.corpus_dir = corpus.string();
  m.acoustic = AcousticChoice::parse("lite");
  m.text = TextChoice::parse("none");
  m.output_dir = temp_dir("exp_missing_wav_out").string();
  CHECK_THROWS_WITH_AS(run_experiment(m), doctest::Contains("iv0001.wav"), Error);
}

TEST_CASE("compare: a report against itself gives p = 1 everywhere") {
  const auto corpus = make_corpus("exp_compare", 10, false);
  Manifest m;
  m.corpus_dir = corpus.string();
  m.acoustic = AcousticChoice::parse("none");
  m.text = TextChoice::parse("tfidf");
  m.output_dir = temp_dir("exp_compare_out").string();
  m.plan.runs = 2;
  m.plan.k = 3;
  const auto report = run_experiment(m);

  const auto rows = compare_reports(report, report, true);
  CHECK(rows.size() == 4);
  for (const auto& row : rows) {
    CHECK(row.p == doctest::Approx(1.0));
    CHECK_FALSE(row.significant);
  }
}

TEST_CASE("compare rejects mismatched plans and datasets") {
  const auto corpus = make_corpus("exp_compare_bad", 10, false);
  Manifest m;
  m.corpus_dir = corpus.string();
  m.acoustic = AcousticChoice::parse("none");
  m.text = TextChoice::parse("tfidf");
  m.output_dir = temp_dir("exp_compare_bad_out").string();
  m.plan.runs = 2;
  m.plan.k = 3;
  const auto a = run_experiment(m);

  m.plan.base_seed = 43;
  const auto b = run_experiment(m);
  CHECK_THROWS_WITH_AS(compare_reports(a, b, true), doctest::Contains("plans differ"),
                       Error);

  // Same plan, different corpus: paired comparison refuses, Welch runs.
  const auto corpus2 = make_corpus("exp_compare_bad2", 10, false, 99);
  Manifest m2 = m;
  m2.plan.base_seed = 42;
  m.plan.base_seed = 42;
  m2.corpus_dir = corpus2.string();
  m2.output_dir = temp_dir("exp_compare_bad2_out").string();
  const auto a2 = run_experiment(m);
  const auto b2 = run_experiment(m2);
  CHECK_THROWS_WITH_AS(compare_reports(a2, b2, true), doctest::Contains("datasets differ"),
                       Error);
  CHECK_NOTHROW(compare_reports(a2, b2, false));
}

TEST_CASE("cli exit codes: 0 success, 1 validation, 2 runtime") {
  const auto corpus = make_corpus("cli_codes", 4, false);
  const auto out = temp_dir("cli_codes_out");

  CHECK(run_cli("ingest --corpus " + corpus.string()) == 0);
  CHECK(run_cli("run --manifest /nonexistent/manifest.json") == 1);
  CHECK(run_cli("ingest --corpus /nonexistent/corpus") == 1);

  // Manifest validates but the referenced WAVs are absent: runtime error.
  const auto manifest_path = out / "m.json";
  {
    std::ofstream mf(manifest_path);
    json j = {{"corpus_dir", corpus.string()},
              {"acoustic", "lite"},
              {"text", "none"},
              {"cv", {{"k", 2}, {"runs", 1}}},
              {"output_dir", (out / "run").string()}};
    mf << j.dump();
  }
  CHECK(run_cli("run --manifest " + manifest_path.string()) == 2);
}

TEST_CASE("cli run produces a report consumable by cli report and compare") {
  const auto corpus = make_corpus("cli_roundtrip", 8, false);
  const auto out = temp_dir("cli_roundtrip_out");
  const auto manifest_path = out / "m.json";
  {
    std::ofstream mf(manifest_path);
    json j = {{"corpus_dir", corpus.string()},
              {"acoustic", "none"},
              {"text", "tfidf"},
              {"classifiers", json::array({{{"kind", "knn"}, {"k", 3}}})},
              {"cv", {{"k", 3}, {"runs", 2}}},
              {"output_dir", (out / "run").string()}};
    mf << j.dump();
  }
  CHECK(run_cli("run --manifest " + manifest_path.string()) == 0);
  CHECK(fs::exists(out / "run" / "report.json"));
  CHECK(run_cli("report --report " + (out / "run" / "report.json").string() + " --out " +
                (out / "rerender").string()) == 0);
  CHECK(fs::exists(out / "rerender" / "confusion.svg"));
  CHECK(run_cli("compare --a " + (out / "run" / "report.json").string() + " --b " +
                (out / "run" / "report.json").string()) == 0);
}

TEST_CASE("every rendered number is recomputable from the stored fold scores") {
  const auto corpus = make_corpus("exp_recompute", 10, false);
  Manifest m;
  m.corpus_dir = corpus.string();
  m.acoustic = AcousticChoice::parse("none");
  m.text = TextChoice::parse("tfidf-pun");
  m.output_dir = temp_dir("exp_recompute_out").string();
  m.plan.runs = 3;
  m.plan.k = 4;
  const auto report = run_experiment(m);

  for (const auto& cr : report.classifiers) {
    std::vector<double> run_means;
    for (const auto& run : cr.runs) {
      double mean = 0;
      for (const auto& fs2 : run.folds) mean += fs2.weighted;
      mean /= static_cast<double>(run.folds.size());
      CHECK(mean == doctest::Approx(run.run_mean.weighted).epsilon(1e-12));
      run_means.push_back(mean);
    }
    double overall = 0;
    for (double v : run_means) overall += v;
    overall /= static_cast<double>(run_means.size());
    CHECK(overall == doctest::Approx(cr.weighted.mean_runs).epsilon(1e-12));
  }
}
