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

#include <array>
#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace fmss::corpus {

enum class Speaker { interviewer, caregiver };
enum class Subject { twin1, twin2, both };
enum class Twin { t1, t2 };
enum class Label3 { low = 0, moderate = 1, high = 2 };

const char* to_string(Label3 l);
const char* to_string(Twin t);

// Controlled vocabulary of utterance topics. Tags only validate against a
// loaded vocabulary, so the accepted tag set is exactly
// {int,mum} x {t1,t2,both} x topics.
class TagVocabulary {
 public:
  explicit TagVocabulary(std::vector<std::string> topics);

  // Plain-text config: one topic identifier per line, '#' comments allowed.
  static TagVocabulary load(const std::filesystem::path& path);
  // The 19 stock topics used by the synthetic generator.
  static const TagVocabulary& builtin_default();

  bool contains(const std::string& topic) const;
  const std::vector<std::string>& topics() const { return topics_; }

 private:
  std::vector<std::string> topics_;
};

// One utterance tag, serialized as `<speaker>-<subject>-<topic>` with
// speaker in {int, mum} and subject in {t1, t2, both}.
struct UtteranceTag {
  Speaker speaker;
  Subject subject;
  std::string topic;

  std::string to_string() const;
  bool operator==(const UtteranceTag&) const = default;
};

UtteranceTag parse_tag(const std::string& s, const TagVocabulary& vocab);

struct Utterance {
  double start_s = 0;
  double end_s = 0;
  UtteranceTag tag;
  std::string text;  // raw, punctuation preserved
};

struct Interview {
  std::string id;
  std::string audio_path;
  std::vector<Utterance> utterances;   // non-decreasing start_s
  std::map<Twin, int> labels6;         // exactly {t1, t2}, codes 0..5
};

// Total, monotone 6-way warmth code -> 3-way class mapping.
class MergeScheme {
 public:
  // {0,1}->low, {2,3}->moderate, {4,5}->high
  static MergeScheme defaults();
  // "0,1=low;2,3=moderate;4,5=high"
  static MergeScheme parse(const std::string& s);

  Label3 map(int label6) const;
  std::string to_string() const;

 private:
  explicit MergeScheme(std::array<Label3, 6> m) : mapping_(m) {}
  std::array<Label3, 6> mapping_;
};

Label3 merge_labels(int label6, const MergeScheme& scheme);

struct LabelRow {
  std::string interview_id;
  Twin twin;
  int warmth6;
};

// CSV with header `interview_id,twin,warmth6`.
std::vector<LabelRow> read_label_table(const std::filesystem::path& csv);

// JSON-lines transcript: one utterance object per line with fields
// start_s, end_s, tag, text. Errors cite the offending line.
Interview parse_transcript(const std::filesystem::path& jsonl_path,
                           const std::vector<LabelRow>& labels,
                           const TagVocabulary& vocab,
                           const std::string& audio_path);

// The unit of classification: caregiver utterances about one twin.
struct TwinSample {
  std::string sample_id;          // "<interview_id>_<twin>"
  std::string source_interview;
  Twin twin;
  std::vector<Utterance> caregiver_utterances;
  int label6 = 0;
  Label3 label3 = Label3::low;
};

// Caregiver utterances with subject in {this twin, both}, original order.
// subject=both utterances are duplicated into both samples. Interviewer
// utterances are never included. Empty samples are kept and flagged.
std::pair<TwinSample, TwinSample> split_by_twin(const Interview& iv, const MergeScheme& scheme,
                                                std::vector<std::string>* warnings = nullptr);

// On-disk layout: labels.csv, topics.txt, transcripts/<id>.jsonl,
// audio/<id>.wav. Interviews are ordered by id; samples t1 then t2.
struct Corpus {
  std::vector<Interview> interviews;
  std::vector<TwinSample> samples;
  std::vector<std::string> warnings;
};

Corpus load_corpus(const std::filesystem::path& dir, const MergeScheme& scheme);

}  // namespace fmss::corpus
