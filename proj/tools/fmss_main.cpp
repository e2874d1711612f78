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

#include <cstdio>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"

#include "fmss/corpus.hpp"
#include "fmss/error.hpp"
#include "fmss/experiment.hpp"
#include "fmss/synth.hpp"
#include "fmss/util.hpp"

namespace {

using nlohmann::json;

struct SynthArgs {
  std::string out_dir;
  int n_interviews = 10;
  double signal_strength = 1.0;
  double snr_db = 20.0;
  uint64_t seed = 0;
  std::string priors;
  bool no_audio = false;
  unsigned threads = 0;
};

int cmd_synth(const SynthArgs& args) {
  fmss::synth::SynthConfig cfg;
  cfg.n_interviews = args.n_interviews;
  cfg.signal_strength = args.signal_strength;
  cfg.acoustic_noise_snr_db = args.snr_db;
  cfg.seed = args.seed;
  cfg.write_audio = !args.no_audio;
  if (!args.priors.empty()) {
    const auto parts = fmss::split(args.priors, ',');
    if (parts.size() != 6)
      throw fmss::Error::validation("--priors expects 6 comma-separated values");
    for (size_t i = 0; i < 6; ++i) cfg.class_priors[i] = std::stod(parts[i]);
  }
  fmss::synth::generate_corpus(cfg, args.out_dir, args.threads);
  std::cout << "generated " << cfg.n_interviews << " interviews ("
            << 2 * cfg.n_interviews << " samples) in " << args.out_dir << "\n";
  return 0;
}

struct IngestArgs {
  std::string corpus_dir;
  std::string merge = "0,1=low;2,3=moderate;4,5=high";
  std::string out_json;
};

int cmd_ingest(const IngestArgs& args) {
  const auto scheme = fmss::corpus::MergeScheme::parse(args.merge);
  const auto corpus = fmss::corpus::load_corpus(args.corpus_dir, scheme);

  std::array<int, 3> class_counts{};
  json samples = json::array();
  for (const auto& s : corpus.samples) {
    ++class_counts[static_cast<size_t>(s.label3)];
    double speech_s = 0;
    for (const auto& u : s.caregiver_utterances) speech_s += u.end_s - u.start_s;
    samples.push_back({{"sample_id", s.sample_id},
                       {"interview", s.source_interview},
                       {"twin", fmss::corpus::to_string(s.twin)},
                       {"warmth6", s.label6},
                       {"warmth3", fmss::corpus::to_string(s.label3)},
                       {"n_utterances", s.caregiver_utterances.size()},
                       {"speech_seconds", speech_s}});
  }

  json summary = {{"corpus_dir", args.corpus_dir},
                  {"merge_scheme", scheme.to_string()},
                  {"n_interviews", corpus.interviews.size()},
                  {"n_samples", corpus.samples.size()},
                  {"class_counts",
                   {{"low", class_counts[0]},
                    {"moderate", class_counts[1]},
                    {"high", class_counts[2]}}},
                  {"warnings", corpus.warnings},
                  {"samples", std::move(samples)}};

  std::cout << "interviews: " << corpus.interviews.size()
            << "  samples: " << corpus.samples.size() << "  classes low/moderate/high: "
            << class_counts[0] << '/' << class_counts[1] << '/' << class_counts[2] << "\n";
  for (const auto& w : corpus.warnings) std::cout << "warning: " << w << "\n";

  if (!args.out_json.empty()) {
    std::ofstream out(args.out_json);
    if (!out) throw fmss::Error::runtime("cannot write " + args.out_json);
    out << summary.dump(2) << '\n';
    std::cout << "summary written to " << args.out_json << "\n";
  }
  return 0;
}

struct FeaturesArgs {
  std::string corpus_dir;
  std::string out_dir = ".";
  std::string merge = "0,1=low;2,3=moderate;4,5=high";
  std::string acoustic = "lite";
  std::string text = "none";
  unsigned threads = 0;
};

int cmd_features(const FeaturesArgs& args) {
  fmss::exp::Manifest m;
  m.corpus_dir = args.corpus_dir;
  m.merge_scheme = args.merge;
  m.acoustic = fmss::exp::AcousticChoice::parse(args.acoustic);
  m.text = fmss::exp::TextChoice::parse(args.text);
  if (m.text.kind == fmss::exp::TextChoice::Kind::tfidf ||
      m.text.kind == fmss::exp::TextChoice::Kind::tfidf_pun)
    throw fmss::Error::validation(
        "features: tfidf variants are fold-dependent and are fitted inside `fmss run`; "
        "export supports embedding:<file>, import:<csv> or none");
  m.threads = args.threads;
  if (m.acoustic.kind == fmss::exp::AcousticChoice::Kind::none &&
      m.text.kind == fmss::exp::TextChoice::Kind::none)
    throw fmss::Error::validation("features: nothing to export (acoustic and text are none)");

  std::vector<std::string> warnings;
  const auto ds = fmss::exp::build_dataset(m, &warnings);
  std::filesystem::create_directories(args.out_dir);
  if (ds.acoustic) {
    const auto path = std::filesystem::path(args.out_dir) / "acoustic.csv";
    fmss::export_features(*ds.acoustic, path);
    std::cout << "wrote " << path.string() << " (" << ds.acoustic->values.cols
              << " features)\n";
  }
  if (ds.text_fixed) {
    const auto path = std::filesystem::path(args.out_dir) / "text.csv";
    fmss::export_features(*ds.text_fixed, path);
    std::cout << "wrote " << path.string() << " (" << ds.text_fixed->values.cols
              << " features)\n";
  }
  for (const auto& w : warnings) std::cout << "warning: " << w << "\n";
  return 0;
}

int cmd_run(const std::string& manifest_path) {
  const auto manifest = fmss::exp::Manifest::load(manifest_path);
  std::cout << "resolved configuration:\n" << manifest.resolved().dump(2) << "\n";
  const auto report = fmss::exp::run_experiment(manifest);
  std::cout << fmss::exp::render_report_text(report);
  std::cout << "artifacts written to " << manifest.output_dir << "\n";
  return 0;
}

int cmd_compare(const std::string& path_a, const std::string& path_b, bool welch) {
  const auto a = fmss::eval::CvReport::load(path_a);
  const auto b = fmss::eval::CvReport::load(path_b);
  const auto rows = fmss::exp::compare_reports(a, b, /*paired=*/!welch);
  std::cout << fmss::exp::render_compare_text(rows);
  return 0;
}

int cmd_report(const std::string& report_path, const std::string& out_dir) {
  const auto report = fmss::eval::CvReport::load(report_path);
  std::cout << fmss::exp::render_report_text(report);
  if (!out_dir.empty()) {
    fmss::exp::write_report_artifacts(report, out_dir);
    std::cout << "artifacts written to " << out_dir << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Caregiver-warmth classification pipeline for tagged five-minute speech samples"};
  app.require_subcommand(1);

  SynthArgs synth_args;
  auto* synth = app.add_subcommand("synth", "Generate a seeded synthetic corpus");
  synth->add_option("--out", synth_args.out_dir, "Output corpus directory")->required();
  synth->add_option("--n-interviews", synth_args.n_interviews, "Number of interviews");
  synth->add_option("--signal-strength", synth_args.signal_strength,
                    "Planted class signal in [0,1]");
  synth->add_option("--snr-db", synth_args.snr_db, "Additive noise SNR in dB");
  synth->add_option("--seed", synth_args.seed, "Generator seed");
  synth->add_option("--priors", synth_args.priors,
                    "Six comma-separated warmth-code priors (sum to 1)");
  synth->add_flag("--no-audio", synth_args.no_audio, "Skip WAV synthesis");
  synth->add_option("--threads", synth_args.threads, "Worker threads (0 = all cores)");

  IngestArgs ingest_args;
  auto* ingest = app.add_subcommand("ingest", "Validate a corpus and print a summary");
  ingest->add_option("--corpus", ingest_args.corpus_dir, "Corpus directory")->required();
  ingest->add_option("--merge", ingest_args.merge, "6-to-3 merge scheme");
  ingest->add_option("--out", ingest_args.out_json, "Write a json summary here");

  FeaturesArgs features_args;
  auto* features = app.add_subcommand("features", "Extract feature CSVs from a corpus");
  features->add_option("--corpus", features_args.corpus_dir, "Corpus directory")->required();
  features->add_option("--out", features_args.out_dir, "Output directory");
  features->add_option("--merge", features_args.merge, "6-to-3 merge scheme");
  features->add_option("--acoustic", features_args.acoustic, "lite | import:<csv> | none");
  features->add_option("--text", features_args.text, "embedding:<file> | import:<csv> | none");
  features->add_option("--threads", features_args.threads, "Worker threads (0 = all cores)");

  std::string manifest_path;
  auto* run = app.add_subcommand("run", "Run a manifest-driven experiment");
  run->add_option("--manifest", manifest_path, "Experiment manifest (json)")->required();

  std::string compare_a, compare_b;
  bool welch = false;
  auto* compare = app.add_subcommand("compare", "Significance table between two reports");
  compare->add_option("--a", compare_a, "First report.json")->required();
  compare->add_option("--b", compare_b, "Second report.json")->required();
  compare->add_flag("--welch", welch, "Unpaired Welch test instead of paired");

  std::string report_path, report_out;
  auto* report = app.add_subcommand("report", "Re-render tables and plots from a report");
  report->add_option("--report", report_path, "report.json")->required();
  report->add_option("--out", report_out, "Directory for re-rendered artifacts");

  CLI11_PARSE(app, argc, argv);

  try {
    if (synth->parsed()) return cmd_synth(synth_args);
    if (ingest->parsed()) return cmd_ingest(ingest_args);
    if (features->parsed()) return cmd_features(features_args);
    if (run->parsed()) return cmd_run(manifest_path);
    if (compare->parsed()) return cmd_compare(compare_a, compare_b, welch);
    if (report->parsed()) return cmd_report(report_path, report_out);
  } catch (const fmss::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.kind() == fmss::ErrorKind::validation ? 1 : 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
