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

#include "fmss/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <string>
#include <vector>

#include "json.hpp"

#include "fmss/corpus.hpp"
#include "fmss/error.hpp"
#include "fmss/util.hpp"
#include "fmss/wav.hpp"

namespace fmss::synth {

namespace {

constexpr double kSampleRate = 16000.0;
constexpr double kBaseF0 = 140.0;       // class 0 caregiver mean F0
constexpr double kF0ClassStep = 25.0;   // per class index at full signal
constexpr double kVoiceOffsetStd = 3.5; // per-interview speaker offset
constexpr double kUtteranceF0Std = 5.0;

const std::vector<std::string>& shared_pool() {
  static const std::vector<std::string> pool = {
      "the",    "and",   "she",    "he",     "is",      "was",    "with",  "they",
      "home",   "day",   "time",   "really", "quite",   "just",   "little", "big",
      "things", "likes", "plays",  "goes",   "very",    "well",   "always", "never",
      "sometimes", "often", "busy", "school", "garden",  "morning", "night", "week",
      "year",   "toys",  "games",  "stories", "songs",   "walks",  "park",  "tea"};
  return pool;
}

const std::vector<std::string>& class_pool(int idx) {
  static const std::vector<std::string> low = {
      "difficult", "tired",  "struggle", "cross", "fuss",  "mess",
      "shout",     "trouble", "hard",    "stress", "argue", "bother"};
  static const std::vector<std::string> moderate = {
      "okay",   "fine",  "usual",   "settled", "steady",  "fair",
      "calm",   "regular", "typical", "average", "content", "ordinary"};
  static const std::vector<std::string> high = {
      "wonderful", "lovely",       "adore", "cherish", "delight", "proud",
      "sweet",     "affectionate", "joy",   "warm",    "kind",    "treasure"};
  switch (idx) {
    case 0: return low;
    case 1: return moderate;
    default: return high;
  }
}

struct PlannedUtterance {
  std::string tag;
  std::string text;
  int start_ms = 0;
  int end_ms = 0;
  bool caregiver = false;
  double class_idx = 0;  // fractional for subject=both
};

struct InterviewProduct {
  std::string id;
  int warmth6_t1 = 0;
  int warmth6_t2 = 0;
  std::vector<PlannedUtterance> utterances;
  std::vector<double> audio;
};

int sample_prior(Rng& rng, const std::array<double, 6>& priors) {
  const double u = rng.next_unit();
  double cum = 0;
  for (int c = 0; c < 6; ++c) {
    cum += priors[c];
    if (u < cum) return c;
  }
  return 5;
}

// Token text for one caregiver utterance. Class-marker tokens appear with
// probability 0.42 * signal_strength; a marker comes from the own-class
// pool at rate 0.58 and from an ordinally adjacent pool otherwise, which
// keeps the middle class hardest to separate and the lexical channel
// weaker than the prosodic one at matched signal strength.
std::string caregiver_text(Rng& rng, double class_idx, double signal) {
  const size_t n_tokens = 4 + rng.below(6);
  const double p_marker = 0.42 * signal;

  std::string text;
  for (size_t t = 0; t < n_tokens; ++t) {
    std::string token;
    if (rng.next_unit() < p_marker) {
      int own = static_cast<int>(std::lround(class_idx));
      if (rng.next_unit() >= 0.58) {  // adjacent-class confusion
        if (own == 0)
          own = 1;
        else if (own == 2)
          own = 1;
        else
          own = rng.next_unit() < 0.5 ? 0 : 2;
      }
      const auto& pool = class_pool(own);
      token = pool[rng.below(pool.size())];
    } else {
      const auto& pool = shared_pool();
      token = pool[rng.below(pool.size())];
    }
    if (!text.empty()) text += ' ';
    text += token;
    if (t + 1 < n_tokens && rng.next_unit() < 0.12) text += ',';
  }

  const double p_excl = 0.05 + 0.15 * signal * (class_idx / 2.0);
  const double u = rng.next_unit();
  text += u < p_excl ? "!" : ".";
  return text;
}

// Harmonic stack with slight vibrato and raised-cosine fades, written
// additively into buffer[start..start+len).
void synth_voiced(std::vector<double>& buffer, size_t start, size_t len, double f0, double amp,
                  int n_harmonics, Rng& rng) {
  std::vector<double> phases(static_cast<size_t>(n_harmonics));
  for (auto& p : phases) p = rng.uniform(0.0, 2.0 * M_PI);
  const double vibrato_phase = rng.uniform(0.0, 2.0 * M_PI);

  double norm = 0;
  for (int h = 1; h <= n_harmonics; ++h) norm += 1.0 / h;
  const double scale = amp / norm;

  const size_t fade = std::min<size_t>(static_cast<size_t>(0.02 * kSampleRate), len / 4);
  for (size_t i = 0; i < len; ++i) {
    const double t = static_cast<double>(i) / kSampleRate;
    const double f = f0 * (1.0 + 0.006 * std::sin(2.0 * M_PI * 4.5 * t + vibrato_phase));
    double v = 0;
    for (int h = 1; h <= n_harmonics; ++h)
      v += (1.0 / h) * std::sin(2.0 * M_PI * f * h * t + phases[static_cast<size_t>(h - 1)]);
    double env = 1.0;
    if (i < fade) env = 0.5 - 0.5 * std::cos(M_PI * static_cast<double>(i) / fade);
    if (len - i <= fade) env = 0.5 - 0.5 * std::cos(M_PI * static_cast<double>(len - i) / fade);
    buffer[start + i] += scale * v * env;
  }
}

InterviewProduct generate_interview(const SynthConfig& cfg, int index) {
  Rng rng(mix_seed(cfg.seed, static_cast<uint64_t>(index)));

  InterviewProduct out;
  char id[16];
  std::snprintf(id, sizeof(id), "iv%04d", index + 1);
  out.id = id;

  out.warmth6_t1 = sample_prior(rng, cfg.class_priors);
  out.warmth6_t2 = sample_prior(rng, cfg.class_priors);
  const auto scheme = corpus::MergeScheme::defaults();
  const double idx_t1 = static_cast<double>(scheme.map(out.warmth6_t1));
  const double idx_t2 = static_cast<double>(scheme.map(out.warmth6_t2));
  const double voice_offset = rng.normal() * kVoiceOffsetStd;

  // Topic plan: six per twin plus two shared, drawn without replacement.
  auto topics = corpus::TagVocabulary::builtin_default().topics();
  rng.shuffle(topics);

  int cursor_ms = 300 + static_cast<int>(rng.below(300));
  auto advance = [&](double dur_s) {
    const int start = cursor_ms;
    cursor_ms += static_cast<int>(std::lround(dur_s * 1000.0));
    return std::pair<int, int>(start, cursor_ms);
  };
  auto gap = [&]() { cursor_ms += 80 + static_cast<int>(rng.below(120)); };

  auto add_interviewer = [&](const std::string& subject, const std::string& topic) {
    PlannedUtterance u;
    u.tag = "int-" + subject + "-" + topic;
    u.text = "tell me about " + topic + "?";
    std::tie(u.start_ms, u.end_ms) = advance(rng.uniform(0.30, 0.50));
    u.caregiver = false;
    out.utterances.push_back(std::move(u));
    gap();
  };
  auto add_caregiver = [&](const std::string& subject, const std::string& topic,
                           double class_idx) {
    PlannedUtterance u;
    u.tag = "mum-" + subject + "-" + topic;
    u.text = caregiver_text(rng, class_idx, cfg.signal_strength);
    std::tie(u.start_ms, u.end_ms) = advance(rng.uniform(0.45, 0.80));
    u.caregiver = true;
    u.class_idx = class_idx;
    out.utterances.push_back(std::move(u));
    gap();
  };

  add_interviewer("both", topics[0]);
  for (int t = 0; t < 6; ++t) {
    if (rng.next_unit() < 0.4) add_interviewer("t1", topics[static_cast<size_t>(t)]);
    add_caregiver("t1", topics[static_cast<size_t>(t)], idx_t1);
  }
  for (int t = 6; t < 12; ++t) {
    if (rng.next_unit() < 0.4) add_interviewer("t2", topics[static_cast<size_t>(t)]);
    add_caregiver("t2", topics[static_cast<size_t>(t)], idx_t2);
  }
  for (int t = 12; t < 14; ++t)
    add_caregiver("both", topics[static_cast<size_t>(t)], (idx_t1 + idx_t2) / 2.0);

  if (!cfg.write_audio) return out;

  const size_t n_samples =
      static_cast<size_t>(std::lround((cursor_ms + 250) / 1000.0 * kSampleRate));
  out.audio.assign(n_samples, 0.0);

  double speech_power_sum = 0;
  size_t speech_samples = 0;
  for (const auto& u : out.utterances) {
    const size_t start = static_cast<size_t>(std::lround(u.start_ms / 1000.0 * kSampleRate));
    const size_t end = static_cast<size_t>(std::lround(u.end_ms / 1000.0 * kSampleRate));
    const size_t len = end - start;

    double f0, amp;
    int harmonics;
    if (u.caregiver) {
      const double mean_f0 =
          kBaseF0 + kF0ClassStep * u.class_idx * cfg.signal_strength + voice_offset;
      f0 = std::clamp(mean_f0 + rng.normal() * kUtteranceF0Std, 75.0, 350.0);
      // Energy variability grows with the class at full signal strength.
      const double sigma_e = 0.08 + 0.125 * u.class_idx * cfg.signal_strength;
      amp = std::clamp(0.22 * std::exp(rng.normal() * sigma_e), 0.03, 0.80);
      harmonics = 5;
    } else {
      f0 = std::clamp(115.0 + rng.normal() * 4.0, 75.0, 350.0);
      amp = std::clamp(0.15 * std::exp(rng.normal() * 0.05), 0.03, 0.80);
      harmonics = 3;
    }
    synth_voiced(out.audio, start, len, f0, amp, harmonics, rng);

    for (size_t i = start; i < end; ++i) speech_power_sum += out.audio[i] * out.audio[i];
    speech_samples += len;
  }

  if (speech_samples > 0) {
    const double speech_power = speech_power_sum / static_cast<double>(speech_samples);
    const double noise_power = speech_power / std::pow(10.0, cfg.acoustic_noise_snr_db / 10.0);
    const double sigma = std::sqrt(noise_power);
    for (auto& s : out.audio) s = std::clamp(s + sigma * rng.normal(), -1.0, 1.0);
  }
  return out;
}

}  // namespace

void generate_corpus(const SynthConfig& cfg, const std::filesystem::path& out_dir,
                     unsigned threads) {
  namespace fs = std::filesystem;
  if (cfg.n_interviews < 1)
    throw Error::validation("synth: n_interviews must be >= 1");
  if (cfg.signal_strength < 0 || cfg.signal_strength > 1)
    throw Error::validation("synth: signal_strength must be in [0, 1]");
  double prior_sum = 0;
  for (double p : cfg.class_priors) {
    if (p < 0) throw Error::validation("synth: class priors must be non-negative");
    prior_sum += p;
  }
  if (std::abs(prior_sum - 1.0) > 1e-9)
    throw Error::validation("synth: class priors must sum to 1");

  std::error_code ec;
  fs::create_directories(out_dir / "transcripts", ec);
  if (cfg.write_audio) fs::create_directories(out_dir / "audio", ec);
  if (!fs::is_directory(out_dir / "transcripts"))
    throw Error::runtime("synth: cannot create output directory " + out_dir.string());

  std::vector<InterviewProduct> products(static_cast<size_t>(cfg.n_interviews));
  parallel_for(products.size(), threads,
               [&](size_t i) { products[i] = generate_interview(cfg, static_cast<int>(i)); });

  {
    std::ofstream topics(out_dir / "topics.txt");
    if (!topics) throw Error::runtime("synth: cannot write topics.txt");
    for (const auto& t : corpus::TagVocabulary::builtin_default().topics()) topics << t << '\n';
  }

  std::ofstream labels(out_dir / "labels.csv");
  if (!labels) throw Error::runtime("synth: cannot write labels.csv");
  labels << "interview_id,twin,warmth6\n";

  for (const auto& p : products) {
    labels << p.id << ",t1," << p.warmth6_t1 << '\n';
    labels << p.id << ",t2," << p.warmth6_t2 << '\n';

    std::ofstream transcript(out_dir / "transcripts" / (p.id + ".jsonl"));
    if (!transcript) throw Error::runtime("synth: cannot write transcript for " + p.id);
    for (const auto& u : p.utterances) {
      nlohmann::json line = {{"start_s", u.start_ms / 1000.0},
                             {"end_s", u.end_ms / 1000.0},
                             {"tag", u.tag},
                             {"text", u.text}};
      transcript << line.dump() << '\n';
    }

    if (cfg.write_audio) {
      acoustic::Signal sig;
      sig.sample_rate = kSampleRate;
      sig.samples = p.audio;
      acoustic::write_wav16(out_dir / "audio" / (p.id + ".wav"), sig);
    }
  }
}

}  // namespace fmss::synth
