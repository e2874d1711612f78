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

#include "fmss/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

#include "fmss/error.hpp"
#include "fmss/util.hpp"

namespace fmss::corpus {

using nlohmann::json;

const char* to_string(Label3 l) {
  switch (l) {
    case Label3::low: return "low";
    case Label3::moderate: return "moderate";
    case Label3::high: return "high";
  }
  return "?";
}

const char* to_string(Twin t) { return t == Twin::t1 ? "t1" : "t2"; }

TagVocabulary::TagVocabulary(std::vector<std::string> topics) : topics_(std::move(topics)) {
  if (topics_.empty()) throw Error::validation("tag vocabulary: no topics");
  std::set<std::string> seen;
  for (const auto& t : topics_) {
    if (t.empty() || t.find('-') != std::string::npos)
      throw Error::validation("tag vocabulary: bad topic identifier '" + t + "'");
    if (!seen.insert(t).second)
      throw Error::validation("tag vocabulary: duplicate topic '" + t + "'");
  }
}

TagVocabulary TagVocabulary::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error::validation("cannot open tag vocabulary: " + path.string());
  std::vector<std::string> topics;
  std::string line;
  while (std::getline(in, line)) {
    auto t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    topics.push_back(t);
  }
  return TagVocabulary(std::move(topics));
}

const TagVocabulary& TagVocabulary::builtin_default() {
  static const TagVocabulary vocab({
      "describe", "general", "away", "different", "support", "school", "friends",
      "play", "behaviour", "feelings", "health", "sleep", "eating", "discipline",
      "routine", "siblings", "worry", "enjoy", "future",
  });
  return vocab;
}

bool TagVocabulary::contains(const std::string& topic) const {
  return std::find(topics_.begin(), topics_.end(), topic) != topics_.end();
}

std::string UtteranceTag::to_string() const {
  std::string s = speaker == Speaker::interviewer ? "int" : "mum";
  s += '-';
  switch (subject) {
    case Subject::twin1: s += "t1"; break;
    case Subject::twin2: s += "t2"; break;
    case Subject::both: s += "both"; break;
  }
  s += '-';
  s += topic;
  return s;
}

UtteranceTag parse_tag(const std::string& s, const TagVocabulary& vocab) {
  // Shape: <speaker>-<subject>-<topic>; topic may itself not contain '-'.
  auto first = s.find('-');
  auto second = first == std::string::npos ? std::string::npos : s.find('-', first + 1);
  if (first == std::string::npos || second == std::string::npos || second + 1 >= s.size() ||
      first == 0)
    throw Error::validation("tag '" + s + "': expected <speaker>-<subject>-<topic>");

  const std::string speaker_s = s.substr(0, first);
  const std::string subject_s = s.substr(first + 1, second - first - 1);
  const std::string topic_s = s.substr(second + 1);

  UtteranceTag tag;
  if (speaker_s == "int")
    tag.speaker = Speaker::interviewer;
  else if (speaker_s == "mum")
    tag.speaker = Speaker::caregiver;
  else
    throw Error::validation("tag '" + s + "': unknown speaker '" + speaker_s + "'");

  if (subject_s == "t1")
    tag.subject = Subject::twin1;
  else if (subject_s == "t2")
    tag.subject = Subject::twin2;
  else if (subject_s == "both")
    tag.subject = Subject::both;
  else
    throw Error::validation("tag '" + s + "': unknown subject '" + subject_s + "'");

  if (!vocab.contains(topic_s))
    throw Error::validation("tag '" + s + "': topic '" + topic_s + "' not in vocabulary");
  tag.topic = topic_s;
  return tag;
}

MergeScheme MergeScheme::defaults() {
  return MergeScheme({Label3::low, Label3::low, Label3::moderate, Label3::moderate,
                      Label3::high, Label3::high});
}

MergeScheme MergeScheme::parse(const std::string& s) {
  std::array<Label3, 6> mapping;
  std::array<bool, 6> assigned{};
  for (const auto& group : split(s, ';')) {
    auto eq = group.find('=');
    if (eq == std::string::npos)
      throw Error::validation("merge scheme '" + s + "': expected <codes>=<class>");
    const std::string name = trim(group.substr(eq + 1));
    Label3 label;
    if (name == "low")
      label = Label3::low;
    else if (name == "moderate")
      label = Label3::moderate;
    else if (name == "high")
      label = Label3::high;
    else
      throw Error::validation("merge scheme: unknown class '" + name + "'");
    for (const auto& code_s : split(group.substr(0, eq), ',')) {
      const std::string c = trim(code_s);
      if (c.size() != 1 || c[0] < '0' || c[0] > '5')
        throw Error::validation("merge scheme: bad warmth code '" + c + "'");
      int code = c[0] - '0';
      if (assigned[code])
        throw Error::validation("merge scheme: code " + c + " assigned twice");
      assigned[code] = true;
      mapping[code] = label;
    }
  }
  for (int i = 0; i < 6; ++i)
    if (!assigned[i])
      throw Error::validation("merge scheme: code " + std::to_string(i) + " unassigned");
  for (int i = 1; i < 6; ++i)
    if (static_cast<int>(mapping[i]) < static_cast<int>(mapping[i - 1]))
      throw Error::validation("merge scheme: mapping must be monotone non-decreasing");
  return MergeScheme(mapping);
}

Label3 MergeScheme::map(int label6) const {
  if (label6 < 0 || label6 > 5)
    throw Error::validation("warmth code " + std::to_string(label6) + " outside 0..5");
  return mapping_[static_cast<size_t>(label6)];
}

std::string MergeScheme::to_string() const {
  std::string out;
  for (int cls = 0; cls < 3; ++cls) {
    std::string codes;
    for (int i = 0; i < 6; ++i) {
      if (static_cast<int>(mapping_[i]) == cls) {
        if (!codes.empty()) codes += ',';
        codes += static_cast<char>('0' + i);
      }
    }
    if (codes.empty()) continue;
    if (!out.empty()) out += ';';
    out += codes + "=" + corpus::to_string(static_cast<Label3>(cls));
  }
  return out;
}

Label3 merge_labels(int label6, const MergeScheme& scheme) { return scheme.map(label6); }

std::vector<LabelRow> read_label_table(const std::filesystem::path& csv) {
  std::ifstream in(csv);
  if (!in) throw Error::validation("cannot open label table: " + csv.string());
  std::string line;
  if (!std::getline(in, line))
    throw Error::validation("label table is empty: " + csv.string());
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (trim(line) != "interview_id,twin,warmth6")
    throw Error::validation("label table header must be 'interview_id,twin,warmth6'");

  std::vector<LabelRow> rows;
  std::set<std::pair<std::string, Twin>> seen;
  size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    auto cells = split(line, ',');
    if (cells.size() != 3)
      throw Error::validation("label table line " + std::to_string(line_no) +
                              ": expected 3 cells");
    LabelRow row;
    row.interview_id = trim(cells[0]);
    const std::string twin_s = trim(cells[1]);
    if (twin_s == "t1")
      row.twin = Twin::t1;
    else if (twin_s == "t2")
      row.twin = Twin::t2;
    else
      throw Error::validation("label table line " + std::to_string(line_no) +
                              ": twin must be t1 or t2");
    const std::string code_s = trim(cells[2]);
    if (code_s.size() != 1 || code_s[0] < '0' || code_s[0] > '9')
      throw Error::validation("label table line " + std::to_string(line_no) +
                              ": bad warmth6 '" + code_s + "'");
    row.warmth6 = code_s[0] - '0';
    if (row.warmth6 > 5)
      throw Error::validation("label table line " + std::to_string(line_no) + ": warmth6 " +
                              code_s + " outside 0..5");
    if (!seen.insert({row.interview_id, row.twin}).second)
      throw Error::validation("label table line " + std::to_string(line_no) +
                              ": duplicate entry for " + row.interview_id + "/" + twin_s);
    rows.push_back(std::move(row));
  }
  return rows;
}

namespace {

double require_number(const json& obj, const char* field, size_t line_no) {
  if (!obj.contains(field) || !obj[field].is_number())
    throw Error::validation("transcript line " + std::to_string(line_no) +
                            ": missing numeric field '" + field + "'");
  return obj[field].get<double>();
}

std::string require_string(const json& obj, const char* field, size_t line_no) {
  if (!obj.contains(field) || !obj[field].is_string())
    throw Error::validation("transcript line " + std::to_string(line_no) +
                            ": missing string field '" + field + "'");
  return obj[field].get<std::string>();
}

}  // namespace

Interview parse_transcript(const std::filesystem::path& jsonl_path,
                           const std::vector<LabelRow>& labels, const TagVocabulary& vocab,
                           const std::string& audio_path) {
  std::ifstream in(jsonl_path);
  if (!in) throw Error::validation("cannot open transcript: " + jsonl_path.string());

  Interview iv;
  iv.id = jsonl_path.stem().string();
  iv.audio_path = audio_path;

  for (const auto& row : labels) {
    if (row.interview_id != iv.id) continue;
    if (!iv.labels6.emplace(row.twin, row.warmth6).second)
      throw Error::validation("interview " + iv.id + ": duplicate label for twin " +
                              std::string(to_string(row.twin)));
  }
  if (iv.labels6.size() != 2)
    throw Error::validation("interview " + iv.id +
                            ": label table must contain exactly twins t1 and t2");

  std::string line;
  size_t line_no = 0;
  double prev_start = -1.0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    json obj = json::parse(line, nullptr, false);
    if (obj.is_discarded())
      throw Error::validation("transcript " + iv.id + " line " + std::to_string(line_no) +
                              ": invalid json");
    Utterance u;
    u.start_s = require_number(obj, "start_s", line_no);
    u.end_s = require_number(obj, "end_s", line_no);
    u.text = require_string(obj, "text", line_no);
    const std::string tag_s = require_string(obj, "tag", line_no);
    try {
      u.tag = parse_tag(tag_s, vocab);
    } catch (const Error& e) {
      throw Error::validation("transcript " + iv.id + " line " + std::to_string(line_no) +
                              ": " + e.what());
    }
    if (u.start_s < 0)
      throw Error::validation("transcript " + iv.id + " line " + std::to_string(line_no) +
                              ": start_s < 0");
    if (u.end_s <= u.start_s)
      throw Error::validation("transcript " + iv.id + " line " + std::to_string(line_no) +
                              ": end_s must exceed start_s");
    if (u.start_s < prev_start)
      throw Error::validation("transcript " + iv.id + " line " + std::to_string(line_no) +
                              ": start_s decreases");
    prev_start = u.start_s;
    iv.utterances.push_back(std::move(u));
  }
  return iv;
}

std::pair<TwinSample, TwinSample> split_by_twin(const Interview& iv, const MergeScheme& scheme,
                                                std::vector<std::string>* warnings) {
  auto make = [&](Twin twin) {
    TwinSample s;
    s.sample_id = iv.id + "_" + to_string(twin);
    s.source_interview = iv.id;
    s.twin = twin;
    s.label6 = iv.labels6.at(twin);
    s.label3 = scheme.map(s.label6);
    const Subject own = twin == Twin::t1 ? Subject::twin1 : Subject::twin2;
    for (const auto& u : iv.utterances) {
      if (u.tag.speaker != Speaker::caregiver) continue;
      if (u.tag.subject == own || u.tag.subject == Subject::both)
        s.caregiver_utterances.push_back(u);
    }
    if (s.caregiver_utterances.empty() && warnings)
      warnings->push_back("sample " + s.sample_id + " has no caregiver utterances");
    return s;
  };
  return {make(Twin::t1), make(Twin::t2)};
}

Corpus load_corpus(const std::filesystem::path& dir, const MergeScheme& scheme) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir))
    throw Error::validation("corpus directory not found: " + dir.string());
  const fs::path labels_path = dir / "labels.csv";
  const fs::path topics_path = dir / "topics.txt";
  const fs::path transcripts_dir = dir / "transcripts";
  if (!fs::exists(labels_path))
    throw Error::validation("corpus is missing labels.csv: " + labels_path.string());
  if (!fs::is_directory(transcripts_dir))
    throw Error::validation("corpus is missing transcripts/: " + transcripts_dir.string());

  const TagVocabulary vocab =
      fs::exists(topics_path) ? TagVocabulary::load(topics_path) : TagVocabulary::builtin_default();
  const auto labels = read_label_table(labels_path);

  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(transcripts_dir))
    if (entry.is_regular_file() && entry.path().extension() == ".jsonl")
      files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  if (files.empty())
    throw Error::validation("corpus has no transcripts: " + transcripts_dir.string());

  Corpus corpus;
  for (const auto& f : files) {
    const std::string audio = (dir / "audio" / (f.stem().string() + ".wav")).string();
    corpus.interviews.push_back(parse_transcript(f, labels, vocab, audio));
  }
  for (const auto& iv : corpus.interviews) {
    auto [a, b] = split_by_twin(iv, scheme, &corpus.warnings);
    corpus.samples.push_back(std::move(a));
    corpus.samples.push_back(std::move(b));
  }
  return corpus;
}

}  // namespace fmss::corpus
