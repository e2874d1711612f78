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

#include "fmss/acoustic.hpp"

#include <algorithm>
#include <cmath>

#include "fmss/dsp.hpp"
#include "fmss/error.hpp"
#include "fmss/util.hpp"

namespace fmss::acoustic {

namespace {

constexpr double kEnergyFloor = 1e-10;
constexpr size_t kMelFilters = 26;
constexpr size_t kMfccCount = 13;

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

// Triangular mel filterbank over FFT bins 0..n_bins-1 (bin k at k*sr/W Hz).
std::vector<std::vector<double>> build_mel_filterbank(size_t n_bins, double sample_rate,
                                                      size_t frame_len) {
  const double nyquist = sample_rate / 2.0;
  const double mel_max = hz_to_mel(nyquist);
  std::vector<double> edges(kMelFilters + 2);
  for (size_t i = 0; i < edges.size(); ++i)
    edges[i] = mel_to_hz(mel_max * static_cast<double>(i) / (kMelFilters + 1));

  std::vector<std::vector<double>> fb(kMelFilters, std::vector<double>(n_bins, 0.0));
  for (size_t m = 0; m < kMelFilters; ++m) {
    const double lo = edges[m], mid = edges[m + 1], hi = edges[m + 2];
    for (size_t k = 0; k < n_bins; ++k) {
      const double f = static_cast<double>(k) * sample_rate / static_cast<double>(frame_len);
      double w = 0.0;
      if (f >= lo && f < mid && mid > lo)
        w = (f - lo) / (mid - lo);
      else if (f >= mid && f <= hi && hi > mid)
        w = (hi - f) / (hi - mid);
      fb[m][k] = w;
    }
  }
  return fb;
}

std::vector<double> build_window(size_t n, WindowFn fn) {
  std::vector<double> w(n);
  for (size_t i = 0; i < n; ++i) {
    double phase = 2.0 * M_PI * static_cast<double>(i) / static_cast<double>(n - 1);
    w[i] = fn == WindowFn::hamming ? 0.54 - 0.46 * std::cos(phase)
                                   : 0.5 - 0.5 * std::cos(phase);
  }
  return w;
}

}  // namespace

const std::vector<std::string>& lld_column_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> n = {"log_energy", "zcr",       "f0",        "voicing",
                                  "spec_centroid", "spec_flux", "spec_rolloff"};
    for (size_t i = 1; i <= kMfccCount; ++i) n.push_back("mfcc" + std::to_string(i));
    n.push_back("jitter");
    n.push_back("shimmer");
    return n;
  }();
  return names;
}

const std::vector<std::string>& functional_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> n;
    for (const auto& c : lld_column_names()) {
      n.push_back(c + "_mean");
      n.push_back(c + "_std");
    }
    return n;
  }();
  return names;
}

LldMatrix compute_llds(const Signal& sig, const FrameConfig& cfg) {
  if (sig.sample_rate <= 0) throw Error::validation("compute_llds: sample rate must be > 0");
  if (cfg.hop_s <= 0 || cfg.hop_s > cfg.window_s)
    throw Error::validation("compute_llds: require 0 < hop_s <= window_s");

  const double sr = sig.sample_rate;
  const size_t W = static_cast<size_t>(std::llround(cfg.window_s * sr));
  const size_t H = static_cast<size_t>(std::llround(cfg.hop_s * sr));
  const size_t N = sig.samples.size();
  if (W < 2 || H < 1) throw Error::validation("compute_llds: window too short");
  if (N < W)
    throw Error::validation("compute_llds: signal shorter than one window (" +
                            std::to_string(N) + " < " + std::to_string(W) + " samples)");

  const size_t n_frames = (N - W) / H + 1;
  const auto& names = lld_column_names();

  LldMatrix out;
  out.column_names = names;
  out.columns = Matrix(n_frames, kLldColumns);
  out.frame_times.resize(n_frames);
  out.voiced_mask.assign(n_frames, 0);

  const auto window = build_window(W, cfg.window_fn);
  const dsp::Dft dft(W);
  const dsp::Autocorr ac(W);
  const size_t n_bins = W / 2 + 1;
  const auto mel_fb = build_mel_filterbank(n_bins, sr, W);

  // c_j = sum_m log(E_m) cos(pi j (m + 0.5) / M), j = 1..13
  std::vector<std::vector<double>> dct(kMfccCount, std::vector<double>(kMelFilters));
  for (size_t j = 0; j < kMfccCount; ++j)
    for (size_t m = 0; m < kMelFilters; ++m)
      dct[j][m] = std::cos(M_PI * static_cast<double>(j + 1) *
                           (static_cast<double>(m) + 0.5) / static_cast<double>(kMelFilters));

  enum Col {
    kLogEnergy = 0, kZcr, kF0, kVoicing, kCentroid, kFlux, kRolloff, kMfccBase,
    kJitter = kMfccBase + 12 + 1,
    kShimmer
  };

  std::vector<double> windowed(W);
  std::vector<double> prev_mag;
  std::vector<double> rms(n_frames, 0.0);

  for (size_t t = 0; t < n_frames; ++t) {
    const double* frame = sig.samples.data() + t * H;
    out.frame_times[t] = (static_cast<double>(t * H) + static_cast<double>(W) / 2.0) / sr;

    double energy = 0;
    size_t crossings = 0;
    for (size_t i = 0; i < W; ++i) {
      energy += frame[i] * frame[i];
      if (i > 0 && frame[i - 1] * frame[i] < 0) ++crossings;
      windowed[i] = frame[i] * window[i];
    }
    rms[t] = std::sqrt(energy / static_cast<double>(W));
    out.columns.at(t, kLogEnergy) = std::log10(std::max(energy, kEnergyFloor));
    out.columns.at(t, kZcr) = static_cast<double>(crossings) / static_cast<double>(W - 1);

    auto pitch = dsp::estimate_f0({frame, W}, sr, ac, {});
    out.voiced_mask[t] = pitch.voiced ? 1 : 0;
    out.columns.at(t, kF0) = pitch.f0_hz;
    out.columns.at(t, kVoicing) = pitch.voicing;

    const auto mag = dft.magnitude({windowed.data(), W});

    double mag_sum = 0, weighted = 0, power_total = 0;
    for (size_t k = 0; k < mag.size(); ++k) {
      const double f = static_cast<double>(k) * sr / static_cast<double>(W);
      mag_sum += mag[k];
      weighted += f * mag[k];
      power_total += mag[k] * mag[k];
    }
    out.columns.at(t, kCentroid) = mag_sum > 0 ? weighted / mag_sum : 0.0;

    double flux = 0;
    if (t > 0) {
      for (size_t k = 0; k < mag.size(); ++k) {
        const double d = mag[k] - prev_mag[k];
        flux += d * d;
      }
      flux = std::sqrt(flux);
    }
    out.columns.at(t, kFlux) = flux;

    double rolloff = 0;
    if (power_total > 0) {
      const double target = 0.85 * power_total;
      double cum = 0;
      for (size_t k = 0; k < mag.size(); ++k) {
        cum += mag[k] * mag[k];
        if (cum >= target) {
          rolloff = static_cast<double>(k) * sr / static_cast<double>(W);
          break;
        }
      }
    }
    out.columns.at(t, kRolloff) = rolloff;

    double mel_log[kMelFilters];
    for (size_t m = 0; m < kMelFilters; ++m) {
      double e = 0;
      const auto& fb = mel_fb[m];
      for (size_t k = 0; k < mag.size(); ++k) e += fb[k] * mag[k] * mag[k];
      mel_log[m] = std::log(std::max(e, kEnergyFloor));
    }
    for (size_t j = 0; j < kMfccCount; ++j) {
      double c = 0;
      for (size_t m = 0; m < kMelFilters; ++m) c += mel_log[m] * dct[j][m];
      out.columns.at(t, kMfccBase + j) = c;
    }

    // Frame-to-frame F0/amplitude perturbation proxies on voiced pairs.
    double jitter = 0, shimmer = 0;
    if (t > 0 && out.voiced_mask[t] && out.voiced_mask[t - 1]) {
      const double f_now = out.columns.at(t, kF0);
      const double f_prev = out.columns.at(t - 1, kF0);
      if (f_now > 0) jitter = std::abs(f_now - f_prev) / f_now;
      if (rms[t] > 0) shimmer = std::abs(rms[t] - rms[t - 1]) / rms[t];
    }
    out.columns.at(t, kJitter) = jitter;
    out.columns.at(t, kShimmer) = shimmer;

    prev_mag = mag;
  }
  return out;
}

FunctionalResult functionals(const LldMatrix& llds, std::span<const Segment> segments) {
  const auto& names = lld_column_names();
  const size_t n_cols = names.size();

  std::vector<size_t> pooled;
  for (size_t t = 0; t < llds.n_frames(); ++t) {
    const double c = llds.frame_times[t];
    for (const auto& seg : segments) {
      if (c >= seg.start_s && c < seg.end_s) {
        pooled.push_back(t);
        break;
      }
    }
  }

  FunctionalResult res;
  res.values.assign(2 * n_cols, 0.0);
  if (pooled.empty()) {
    res.empty_pool = true;
    return res;
  }

  // F0-derived columns are summarized over voiced pooled frames only.
  auto voiced_only = [&](const std::string& name) {
    return name == "f0" || name == "jitter" || name == "shimmer";
  };

  for (size_t c = 0; c < n_cols; ++c) {
    const bool voiced_col = voiced_only(names[c]);
    double sum = 0, sum_sq = 0;
    size_t count = 0;
    for (size_t t : pooled) {
      if (voiced_col && !llds.voiced_mask[t]) continue;
      const double v = llds.columns.at(t, c);
      sum += v;
      sum_sq += v * v;
      ++count;
    }
    if (count == 0) continue;  // e.g. no voiced frames: mean/std stay 0
    const double mean = sum / static_cast<double>(count);
    double var = sum_sq / static_cast<double>(count) - mean * mean;
    if (var < 0) var = 0;  // guard tiny negative from rounding
    res.values[2 * c] = mean;
    res.values[2 * c + 1] = std::sqrt(var);
  }
  return res;
}

FeatureMatrix extract_lite_features(const corpus::Corpus& corpus, const LiteOptions& opt,
                                    std::vector<std::string>* warnings) {
  const size_t n_interviews = corpus.interviews.size();
  std::vector<LldMatrix> llds(n_interviews);

  parallel_for(n_interviews, opt.threads, [&](size_t i) {
    const auto& iv = corpus.interviews[i];
    Signal sig = read_wav(iv.audio_path, opt.analysis_rate);
    llds[i] = compute_llds(sig, opt.frame);
  });

  FeatureMatrix out;
  out.feature_names = functional_names();
  out.values = Matrix(corpus.samples.size(), out.feature_names.size());

  // Interviews are ordered and samples reference them by id.
  std::map<std::string, size_t> interview_index;
  for (size_t i = 0; i < n_interviews; ++i) interview_index[corpus.interviews[i].id] = i;

  for (size_t s = 0; s < corpus.samples.size(); ++s) {
    const auto& sample = corpus.samples[s];
    out.sample_ids.push_back(sample.sample_id);
    const size_t iv = interview_index.at(sample.source_interview);

    std::vector<Segment> segments;
    segments.reserve(sample.caregiver_utterances.size());
    for (const auto& u : sample.caregiver_utterances)
      segments.push_back({u.start_s, u.end_s});

    auto fun = functionals(llds[iv], segments);
    if (fun.empty_pool && warnings)
      warnings->push_back("sample " + sample.sample_id +
                          ": no frames pooled, acoustic features are zero");
    std::copy(fun.values.begin(), fun.values.end(), out.values.row(s).begin());
  }
  out.validate();
  return out;
}

}  // namespace fmss::acoustic
