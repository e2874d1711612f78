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

#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "doctest.h"

#include "fmss/corpus.hpp"
#include "fmss/error.hpp"
#include "fmss/synth.hpp"
#include "fmss/util.hpp"

namespace fs = std::filesystem;
using namespace fmss;
using namespace fmss::corpus;

namespace {

fs::path temp_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "fmss_tests" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path);
  out << content;
}

}  // namespace

TEST_CASE("parse_tag handles the documented tag shapes") {
  const auto& vocab = TagVocabulary::builtin_default();

  const auto mum = parse_tag("mum-t1-away", vocab);
  CHECK(mum.speaker == Speaker::caregiver);
  CHECK(mum.subject == Subject::twin1);
  CHECK(mum.topic == "away");
  CHECK(mum.to_string() == "mum-t1-away");

  const auto prompt = parse_tag("int-both-support", vocab);
  CHECK(prompt.speaker == Speaker::interviewer);
  CHECK(prompt.subject == Subject::both);
  CHECK(prompt.topic == "support");
  CHECK(prompt.to_string() == "int-both-support");
}

TEST_CASE("parse_tag names the offending component") {
  const auto& vocab = TagVocabulary::builtin_default();
  CHECK_THROWS_WITH_AS(parse_tag("dad-t1-away", vocab),
                       doctest::Contains("unknown speaker"), Error);
  CHECK_THROWS_WITH_AS(parse_tag("mum-t3-away", vocab),
                       doctest::Contains("unknown subject"), Error);
  CHECK_THROWS_WITH_AS(parse_tag("mum-t1-nonsense", vocab),
                       doctest::Contains("not in vocabulary"), Error);
  CHECK_THROWS_AS(parse_tag("mumt1away", vocab), Error);
  CHECK_THROWS_AS(parse_tag("mum-t1", vocab), Error);
}

TEST_CASE("round-trip and acceptance count over the tag space") {
  const auto& vocab = TagVocabulary::builtin_default();
  REQUIRE(vocab.topics().size() == 19);

  // Every valid tag round-trips.
  for (const char* sp : {"int", "mum"})
    for (const char* sub : {"t1", "t2", "both"})
      for (const auto& topic : vocab.topics()) {
        const std::string s = std::string(sp) + "-" + sub + "-" + topic;
        CHECK(parse_tag(s, vocab).to_string() == s);
      }

  // With the subject fixed, exactly |topics| x 2 candidate strings parse.
  std::vector<std::string> speakers = {"int", "mum", "dad", "x", ""};
  std::vector<std::string> topics = vocab.topics();
  topics.push_back("nonsense");
  topics.push_back("away2");
  int accepted = 0;
  for (const auto& sp : speakers)
    for (const auto& topic : topics) {
      try {
        parse_tag(sp + "-t1-" + topic, vocab);
        ++accepted;
      } catch (const Error&) {
      }
    }
  CHECK(accepted == 2 * 19);
}

TEST_CASE("merge scheme defaults, errors and monotonicity") {
  const auto scheme = MergeScheme::defaults();
  CHECK(merge_labels(0, scheme) == Label3::low);
  CHECK(merge_labels(1, scheme) == Label3::low);
  CHECK(merge_labels(2, scheme) == Label3::moderate);
  CHECK(merge_labels(3, scheme) == Label3::moderate);
  CHECK(merge_labels(4, scheme) == Label3::high);
  CHECK(merge_labels(5, scheme) == Label3::high);
  CHECK_THROWS_AS(merge_labels(6, scheme), Error);
  CHECK_THROWS_AS(merge_labels(-1, scheme), Error);

  CHECK(MergeScheme::parse("0,1=low;2,3=moderate;4,5=high").to_string() ==
        scheme.to_string());
  CHECK(MergeScheme::parse("0=low;1,2,3,4=moderate;5=high").map(4) == Label3::moderate);

  CHECK_THROWS_WITH_AS(MergeScheme::parse("0,2=low;1,3=moderate;4,5=high"),
                       doctest::Contains("monotone"), Error);
  CHECK_THROWS_AS(MergeScheme::parse("0,1=low;2,3=moderate"), Error);   // 4,5 unassigned
  CHECK_THROWS_AS(MergeScheme::parse("0,1=low;1,2=moderate;3,4,5=high"), Error);
  CHECK_THROWS_AS(MergeScheme::parse("0,1=cold;2,3=moderate;4,5=high"), Error);
}

TEST_CASE("3-class histogram equals the mapped 6-class histogram") {
  const auto scheme = MergeScheme::defaults();
  Rng rng(11);
  std::vector<int> codes;
  for (int i = 0; i < 500; ++i) codes.push_back(static_cast<int>(rng.below(6)));

  std::map<int, int> hist6;
  for (int c : codes) ++hist6[c];
  std::map<Label3, int> hist3;
  for (int c : codes) ++hist3[scheme.map(c)];

  for (int cls = 0; cls < 3; ++cls) {
    int mapped = 0;
    for (int c = 0; c < 6; ++c)
      if (scheme.map(c) == static_cast<Label3>(cls)) mapped += hist6[c];
    CHECK(hist3[static_cast<Label3>(cls)] == mapped);
  }
}

TEST_CASE("parse_transcript echoes well-formed input") {
  const auto dir = temp_dir("transcript_ok");
  write_file(dir / "iv1.jsonl",
             R"({"start_s": 0.5, "end_s": 1.5, "tag": "mum-t1-away", "text": "hello"})"
             "\n"
             R"({"start_s": 2.0, "end_s": 3.25, "tag": "int-both-support", "text": "and?"})"
             "\n");
  const std::vector<LabelRow> labels = {{"iv1", Twin::t1, 4}, {"iv1", Twin::t2, 1}};
  const auto iv = parse_transcript(dir / "iv1.jsonl", labels,
                                   TagVocabulary::builtin_default(), "iv1.wav");
  CHECK(iv.id == "iv1");
  REQUIRE(iv.utterances.size() == 2);
  CHECK(iv.utterances[0].text == "hello");
  CHECK(iv.utterances[1].start_s == 2.0);
  CHECK(iv.labels6.at(Twin::t1) == 4);
  CHECK(iv.labels6.at(Twin::t2) == 1);
}

TEST_CASE("parse_transcript cites the offending line") {
  const auto dir = temp_dir("transcript_bad");
  write_file(dir / "iv1.jsonl",
             R"({"start_s": 0.5, "end_s": 1.5, "tag": "mum-t1-away", "text": "a"})"
             "\n"
             R"({"start_s": 2.0, "end_s": 2.5, "tag": "mum-t1-play", "text": "b"})"
             "\n"
             R"({"start_s": 4.0, "end_s": 3.0, "tag": "mum-t2-away", "text": "c"})"
             "\n");
  const std::vector<LabelRow> labels = {{"iv1", Twin::t1, 2}, {"iv1", Twin::t2, 3}};
  CHECK_THROWS_WITH_AS(parse_transcript(dir / "iv1.jsonl", labels,
                                        TagVocabulary::builtin_default(), "iv1.wav"),
                       doctest::Contains("line 3"), Error);
}

TEST_CASE("label table rejects out-of-range warmth codes") {
  const auto dir = temp_dir("labels_bad");
  write_file(dir / "labels.csv", "interview_id,twin,warmth6\niv1,t1,6\n");
  CHECK_THROWS_WITH_AS(read_label_table(dir / "labels.csv"),
                       doctest::Contains("outside 0..5"), Error);

  write_file(dir / "labels2.csv", "interview_id,twin,warmth6\niv1,t3,2\n");
  CHECK_THROWS_AS(read_label_table(dir / "labels2.csv"), Error);

  write_file(dir / "labels3.csv", "interview_id,twin,warmth6\niv1,t1,2\niv1,t1,3\n");
  CHECK_THROWS_WITH_AS(read_label_table(dir / "labels3.csv"),
                       doctest::Contains("duplicate"), Error);
}

TEST_CASE("missing label rows fail ingestion") {
  const auto dir = temp_dir("labels_missing");
  write_file(dir / "iv1.jsonl",
             R"({"start_s": 0.0, "end_s": 1.0, "tag": "mum-t1-away", "text": "a"})"
             "\n");
  const std::vector<LabelRow> labels = {{"iv1", Twin::t1, 2}};  // t2 missing
  CHECK_THROWS_AS(parse_transcript(dir / "iv1.jsonl", labels,
                                   TagVocabulary::builtin_default(), "iv1.wav"),
                  Error);
}

namespace {

Interview make_interview(const std::vector<std::string>& tags) {
  const auto& vocab = TagVocabulary::builtin_default();
  Interview iv;
  iv.id = "iv1";
  iv.labels6[Twin::t1] = 4;
  iv.labels6[Twin::t2] = 1;
  double t = 0;
  for (const auto& tag : tags) {
    Utterance u;
    u.start_s = t;
    u.end_s = t + 1;
    u.tag = parse_tag(tag, vocab);
    u.text = tag;
    iv.utterances.push_back(u);
    t += 1.5;
  }
  return iv;
}

}  // namespace

TEST_CASE("split_by_twin filters by speaker and subject, duplicating both") {
  const auto iv = make_interview(
      {"mum-t1-away", "mum-t2-away", "mum-both-general", "int-both-support"});
  auto [t1, t2] = split_by_twin(iv, MergeScheme::defaults());

  REQUIRE(t1.caregiver_utterances.size() == 2);
  CHECK(t1.caregiver_utterances[0].tag.to_string() == "mum-t1-away");
  CHECK(t1.caregiver_utterances[1].tag.to_string() == "mum-both-general");
  REQUIRE(t2.caregiver_utterances.size() == 2);
  CHECK(t2.caregiver_utterances[0].tag.to_string() == "mum-t2-away");
  CHECK(t2.caregiver_utterances[1].tag.to_string() == "mum-both-general");

  CHECK(t1.sample_id == "iv1_t1");
  CHECK(t1.label6 == 4);
  CHECK(t1.label3 == Label3::high);
  CHECK(t2.label6 == 1);
  CHECK(t2.label3 == Label3::low);
}

TEST_CASE("interviewer-only interviews split into empty samples with warnings") {
  const auto iv = make_interview({"int-t1-describe", "int-both-support"});
  std::vector<std::string> warnings;
  auto [t1, t2] = split_by_twin(iv, MergeScheme::defaults(), &warnings);
  CHECK(t1.caregiver_utterances.empty());
  CHECK(t2.caregiver_utterances.empty());
  CHECK(warnings.size() == 2);
}

TEST_CASE("splitting conserves caregiver utterances") {
  Rng rng(42);
  const auto& vocab = TagVocabulary::builtin_default();
  const char* speakers[] = {"int", "mum"};
  const char* subjects[] = {"t1", "t2", "both"};

  for (int trial = 0; trial < 20; ++trial) {
    std::vector<std::string> tags;
    const size_t n = 1 + rng.below(12);
    for (size_t i = 0; i < n; ++i)
      tags.push_back(std::string(speakers[rng.below(2)]) + "-" + subjects[rng.below(3)] +
                     "-" + vocab.topics()[rng.below(vocab.topics().size())]);
    const auto iv = make_interview(tags);
    auto [t1, t2] = split_by_twin(iv, MergeScheme::defaults());

    size_t caregiver_t1 = 0, caregiver_t2 = 0, caregiver_both = 0;
    for (const auto& u : iv.utterances) {
      if (u.tag.speaker != Speaker::caregiver) continue;
      if (u.tag.subject == Subject::twin1) ++caregiver_t1;
      if (u.tag.subject == Subject::twin2) ++caregiver_t2;
      if (u.tag.subject == Subject::both) ++caregiver_both;
    }
    CHECK(t1.caregiver_utterances.size() == caregiver_t1 + caregiver_both);
    CHECK(t2.caregiver_utterances.size() == caregiver_t2 + caregiver_both);
    for (const auto& u : t1.caregiver_utterances)
      CHECK(u.tag.speaker == Speaker::caregiver);
  }
}

TEST_CASE("37 interviews load into 74 samples") {
  const auto dir = temp_dir("corpus37");
  synth::SynthConfig cfg;
  cfg.n_interviews = 37;
  cfg.seed = 5;
  cfg.write_audio = false;
  synth::generate_corpus(cfg, dir);

  const auto corpus = load_corpus(dir, MergeScheme::defaults());
  CHECK(corpus.interviews.size() == 37);
  CHECK(corpus.samples.size() == 74);
}
