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

#include <filesystem>
#include <vector>

namespace fmss::acoustic {

struct Signal {
  std::vector<double> samples;  // amplitude in [-1, 1]
  double sample_rate = 0;       // Hz
};

// Reads a PCM WAV file (8-bit unsigned or 16-bit signed, mono or stereo).
// Stereo is averaged to mono; output is resampled to target_rate by linear
// interpolation. Non-PCM encodings and truncated files raise format errors.
Signal read_wav(const std::filesystem::path& path, double target_rate = 16000.0);

// 16-bit PCM mono writer; samples are clamped to [-1, 1].
void write_wav16(const std::filesystem::path& path, const Signal& sig);

}  // namespace fmss::acoustic
