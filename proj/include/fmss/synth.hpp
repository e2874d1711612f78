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
#include <cstdint>
#include <filesystem>

namespace fmss::synth {

// Seeded generator for a synthetic five-minute-speech-sample corpus. The
// warmth signal is planted in both modalities:
//   - prosody: caregiver utterances are harmonic stacks whose mean F0 is
//     140 + 25 * class_index * signal_strength Hz, with energy variance
//     scaling with the class;
//   - lexicon: transcript tokens mix a shared pool with class-conditioned
//     keyword pools, the mixing weight driven by signal_strength.
// Output is exactly the corpus module's on-disk layout.
struct SynthConfig {
  int n_interviews = 10;
  double signal_strength = 1.0;             // 0 = no class signal, 1 = strong
  double acoustic_noise_snr_db = 20.0;      // additive white noise level
  std::array<double, 6> class_priors = {0.40, 0.30, 0.11, 0.09, 0.06, 0.04};
  uint64_t seed = 0;
  bool write_audio = true;                  // labels/transcripts only when false
};

void generate_corpus(const SynthConfig& cfg, const std::filesystem::path& out_dir,
                     unsigned threads = 0);

}  // namespace fmss::synth
