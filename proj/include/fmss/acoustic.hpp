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
#include <span>
#include <string>
#include <vector>

#include "fmss/corpus.hpp"
#include "fmss/feature_matrix.hpp"
#include "fmss/matrix.hpp"
#include "fmss/wav.hpp"

namespace fmss::acoustic {

enum class WindowFn { hamming, hann };

struct FrameConfig {
  double window_s = 0.025;
  double hop_s = 0.010;
  WindowFn window_fn = WindowFn::hamming;
};

// Per-frame low-level descriptors. 22 columns in fixed order:
// log_energy, zcr, f0, voicing, spec_centroid, spec_flux, spec_rolloff,
// mfcc1..mfcc13, jitter, shimmer. F0 is exactly 0 on unvoiced frames.
struct LldMatrix {
  std::vector<double> frame_times;   // frame centers, seconds
  std::vector<std::string> column_names;
  Matrix columns;                    // frames x 22
  std::vector<uint8_t> voiced_mask;

  size_t n_frames() const { return frame_times.size(); }
};

constexpr size_t kLldColumns = 22;
const std::vector<std::string>& lld_column_names();

// n_frames = floor((N - W) / H) + 1; errors if the signal is shorter than
// one window. log-energy is log10 of frame power floored at 1e-10; MFCCs
// use 26 triangular mel filters spanning 0..Nyquist, log energies and an
// orthogonal-free DCT-II keeping coefficients 1..13.
LldMatrix compute_llds(const Signal& sig, const FrameConfig& cfg);

struct Segment {
  double start_s = 0;
  double end_s = 0;
};

struct FunctionalResult {
  std::vector<double> values;  // 44 dims: <column>_mean, <column>_std
  bool empty_pool = false;     // no frame center fell inside any segment
};

const std::vector<std::string>& functional_names();

// Pools frames whose center lies in any [start_s, end_s) segment and emits
// mean + population std per LLD column. F0, jitter and shimmer statistics
// use voiced pooled frames only. An empty pool yields a zero vector and a
// warning flag.
FunctionalResult functionals(const LldMatrix& llds, std::span<const Segment> segments);

// The self-contained 44-dim "lite" preset applied to a whole corpus: one
// WAV decode + LLD pass per interview, one pooled vector per twin sample.
struct LiteOptions {
  FrameConfig frame;
  double analysis_rate = 16000.0;
  unsigned threads = 0;
};

FeatureMatrix extract_lite_features(const corpus::Corpus& corpus, const LiteOptions& opt,
                                    std::vector<std::string>* warnings = nullptr);

}  // namespace fmss::acoustic
