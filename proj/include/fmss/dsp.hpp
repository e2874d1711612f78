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

#include <complex>
#include <span>
#include <vector>

namespace fmss::dsp {

// In-place iterative radix-2 FFT; length must be a power of two.
void fft_pow2(std::vector<std::complex<double>>& a, bool inverse);

// DFT of arbitrary length: radix-2 when the length is a power of two,
// Bluestein's chirp-z convolution otherwise. Plans are reusable and
// cheap to apply per frame.
class Dft {
 public:
  explicit Dft(size_t n);

  size_t length() const { return n_; }
  std::vector<std::complex<double>> forward(std::span<const double> frame) const;
  // Magnitudes of bins 0..floor(n/2).
  std::vector<double> magnitude(std::span<const double> frame) const;

 private:
  size_t n_ = 0;
  bool pow2_ = false;
  size_t m_ = 0;                                 // convolution length (power of two)
  std::vector<std::complex<double>> chirp_;      // exp(-i pi k^2 / n)
  std::vector<std::complex<double>> chirp_fft_;  // FFT of the chirp filter
};

// One-shot convenience used by tests and small callers.
std::vector<double> magnitude_spectrum(std::span<const double> frame);

// Biased autocorrelation r[0..n-1] of a frame via zero-padded FFT.
class Autocorr {
 public:
  explicit Autocorr(size_t n);
  void compute(std::span<const double> x, std::vector<double>& r) const;

 private:
  size_t n_ = 0;
  size_t m_ = 0;
};

struct PitchConfig {
  double min_hz = 40.0;
  double max_hz = 500.0;
  double voicing_threshold = 0.45;  // on the normalized autocorrelation peak
};

struct PitchResult {
  double f0_hz = 0;     // 0 when unvoiced
  double voicing = 0;   // normalized autocorrelation peak, clamped to [0, 1]
  bool voiced = false;
};

// Autocorrelation pitch estimate over the configured band, with parabolic
// peak refinement. Silence and aperiodic frames come back unvoiced.
PitchResult estimate_f0(std::span<const double> frame, double sample_rate,
                        const PitchConfig& cfg = {});
PitchResult estimate_f0(std::span<const double> frame, double sample_rate,
                        const Autocorr& plan, const PitchConfig& cfg);

}  // namespace fmss::dsp
