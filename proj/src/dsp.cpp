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

#include "fmss/dsp.hpp"

#include <algorithm>
#include <cmath>

#include "fmss/error.hpp"

namespace fmss::dsp {

namespace {

bool is_pow2(size_t n) { return n != 0 && (n & (n - 1)) == 0; }

size_t next_pow2(size_t n) {
  size_t m = 1;
  while (m < n) m <<= 1;
  return m;
}

}  // namespace

void fft_pow2(std::vector<std::complex<double>>& a, bool inverse) {
  const size_t n = a.size();
  if (!is_pow2(n)) throw Error::runtime("fft_pow2: length must be a power of two");

  // Bit-reversal permutation.
  for (size_t i = 1, j = 0; i < n; ++i) {
    size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }

  for (size_t len = 2; len <= n; len <<= 1) {
    const double ang = (inverse ? 2.0 : -2.0) * M_PI / static_cast<double>(len);
    const std::complex<double> wlen(std::cos(ang), std::sin(ang));
    for (size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (size_t j = 0; j < len / 2; ++j) {
        std::complex<double> u = a[i + j];
        std::complex<double> v = a[i + j + len / 2] * w;
        a[i + j] = u + v;
        a[i + j + len / 2] = u - v;
        w *= wlen;
      }
    }
  }
  if (inverse) {
    const double inv = 1.0 / static_cast<double>(n);
    for (auto& x : a) x *= inv;
  }
}

Dft::Dft(size_t n) : n_(n) {
  if (n < 2) throw Error::validation("dft: frame length must be >= 2");
  pow2_ = is_pow2(n);
  if (pow2_) return;

  // Bluestein tables. Phase arguments are reduced exactly with k^2 mod 2n
  // before touching floating point.
  m_ = next_pow2(2 * n - 1);
  chirp_.resize(n);
  const uint64_t two_n = 2 * static_cast<uint64_t>(n);
  for (size_t k = 0; k < n; ++k) {
    uint64_t q = (static_cast<uint64_t>(k) * k) % two_n;
    double ang = -M_PI * static_cast<double>(q) / static_cast<double>(n);
    chirp_[k] = {std::cos(ang), std::sin(ang)};
  }
  std::vector<std::complex<double>> b(m_, {0.0, 0.0});
  b[0] = std::conj(chirp_[0]);
  for (size_t k = 1; k < n; ++k) {
    b[k] = std::conj(chirp_[k]);
    b[m_ - k] = std::conj(chirp_[k]);
  }
  fft_pow2(b, false);
  chirp_fft_ = std::move(b);
}

std::vector<std::complex<double>> Dft::forward(std::span<const double> frame) const {
  if (frame.size() != n_) throw Error::runtime("dft: frame length mismatch");
  if (pow2_) {
    std::vector<std::complex<double>> a(n_);
    for (size_t i = 0; i < n_; ++i) a[i] = {frame[i], 0.0};
    fft_pow2(a, false);
    return a;
  }
  std::vector<std::complex<double>> a(m_, {0.0, 0.0});
  for (size_t k = 0; k < n_; ++k) a[k] = frame[k] * chirp_[k];
  fft_pow2(a, false);
  for (size_t k = 0; k < m_; ++k) a[k] *= chirp_fft_[k];
  fft_pow2(a, true);
  std::vector<std::complex<double>> out(n_);
  for (size_t k = 0; k < n_; ++k) out[k] = a[k] * chirp_[k];
  return out;
}

std::vector<double> Dft::magnitude(std::span<const double> frame) const {
  auto spec = forward(frame);
  std::vector<double> mag(n_ / 2 + 1);
  for (size_t k = 0; k < mag.size(); ++k) mag[k] = std::abs(spec[k]);
  return mag;
}

std::vector<double> magnitude_spectrum(std::span<const double> frame) {
  Dft plan(frame.size());
  return plan.magnitude(frame);
}

Autocorr::Autocorr(size_t n) : n_(n), m_(next_pow2(2 * n)) {
  if (n < 2) throw Error::validation("autocorr: frame length must be >= 2");
}

void Autocorr::compute(std::span<const double> x, std::vector<double>& r) const {
  if (x.size() != n_) throw Error::runtime("autocorr: frame length mismatch");
  std::vector<std::complex<double>> a(m_, {0.0, 0.0});
  for (size_t i = 0; i < n_; ++i) a[i] = {x[i], 0.0};
  fft_pow2(a, false);
  for (auto& v : a) v = {std::norm(v), 0.0};
  fft_pow2(a, true);
  r.resize(n_);
  for (size_t lag = 0; lag < n_; ++lag) r[lag] = a[lag].real();
}

PitchResult estimate_f0(std::span<const double> frame, double sample_rate,
                        const PitchConfig& cfg) {
  Autocorr plan(frame.size());
  return estimate_f0(frame, sample_rate, plan, cfg);
}

PitchResult estimate_f0(std::span<const double> frame, double sample_rate,
                        const Autocorr& plan, const PitchConfig& cfg) {
  const size_t n = frame.size();
  PitchResult res;
  if (n < 2 || sample_rate <= 0) return res;

  static thread_local std::vector<double> r;
  plan.compute(frame, r);

  const double r0 = r[0];
  if (r0 < 1e-12) return res;  // silence

  size_t lag_min = static_cast<size_t>(std::ceil(sample_rate / cfg.max_hz));
  size_t lag_max = static_cast<size_t>(std::floor(sample_rate / cfg.min_hz));
  lag_min = std::max<size_t>(lag_min, 2);
  lag_max = std::min(lag_max, n - 1);
  if (lag_min > lag_max) return res;  // band not representable in this frame

  size_t best = lag_min;
  double best_val = r[lag_min];
  for (size_t lag = lag_min + 1; lag <= lag_max; ++lag) {
    if (r[lag] > best_val) {
      best_val = r[lag];
      best = lag;
    }
  }

  const double peak = best_val / r0;
  res.voicing = std::clamp(peak, 0.0, 1.0);
  res.voiced = peak > cfg.voicing_threshold;
  if (!res.voiced) return res;

  // Parabolic refinement around the integer peak.
  double refined = static_cast<double>(best);
  if (best > lag_min && best < lag_max) {
    const double y0 = r[best - 1], y1 = r[best], y2 = r[best + 1];
    const double denom = y0 - 2.0 * y1 + y2;
    if (std::abs(denom) > 1e-30) {
      double delta = 0.5 * (y0 - y2) / denom;
      delta = std::clamp(delta, -0.5, 0.5);
      refined += delta;
    }
  }
  res.f0_hz = sample_rate / refined;
  return res;
}

}  // namespace fmss::dsp
