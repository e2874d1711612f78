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

#include "fmss/wav.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "fmss/error.hpp"

namespace fmss::acoustic {

namespace {

uint32_t read_u32(const uint8_t* p) {
  return static_cast<uint32_t>(p[0]) | (static_cast<uint32_t>(p[1]) << 8) |
         (static_cast<uint32_t>(p[2]) << 16) | (static_cast<uint32_t>(p[3]) << 24);
}

uint16_t read_u16(const uint8_t* p) {
  return static_cast<uint16_t>(p[0] | (p[1] << 8));
}

std::vector<double> resample_linear(const std::vector<double>& in, double in_rate,
                                    double out_rate) {
  if (in.empty() || in_rate == out_rate) return in;
  const size_t n_out =
      static_cast<size_t>(std::llround(static_cast<double>(in.size()) * out_rate / in_rate));
  std::vector<double> out(n_out);
  const double step = in_rate / out_rate;
  for (size_t i = 0; i < n_out; ++i) {
    double pos = static_cast<double>(i) * step;
    size_t i0 = static_cast<size_t>(pos);
    if (i0 >= in.size() - 1) {
      out[i] = in.back();
      continue;
    }
    double frac = pos - static_cast<double>(i0);
    out[i] = in[i0] * (1.0 - frac) + in[i0 + 1] * frac;
  }
  return out;
}

}  // namespace

Signal read_wav(const std::filesystem::path& path, double target_rate) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error::runtime("cannot open wav file: " + path.string());
  std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                             std::istreambuf_iterator<char>());

  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0)
    throw Error::validation("not a RIFF/WAVE file: " + path.string());

  uint16_t format = 0, channels = 0, bits = 0;
  uint32_t rate = 0;
  bool have_fmt = false;
  size_t data_off = 0, data_len = 0;

  size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const char* id = reinterpret_cast<const char*>(bytes.data() + pos);
    uint32_t size = read_u32(bytes.data() + pos + 4);
    size_t body = pos + 8;
    if (std::memcmp(id, "fmt ", 4) == 0) {
      if (body + 16 > bytes.size())
        throw Error::validation("truncated fmt chunk: " + path.string());
      format = read_u16(bytes.data() + body);
      channels = read_u16(bytes.data() + body + 2);
      rate = read_u32(bytes.data() + body + 4);
      bits = read_u16(bytes.data() + body + 14);
      have_fmt = true;
    } else if (std::memcmp(id, "data", 4) == 0) {
      data_off = body;
      data_len = size;
    }
    pos = body + size + (size & 1);  // chunks are word-aligned
  }

  if (!have_fmt || data_off == 0)
    throw Error::validation("wav file missing fmt/data chunk: " + path.string());
  if (format != 1)
    throw Error::validation("unsupported wav encoding " + std::to_string(format) +
                            " (PCM only): " + path.string());
  if (channels < 1 || channels > 2)
    throw Error::validation("unsupported channel count " + std::to_string(channels) + ": " +
                            path.string());
  if (bits != 8 && bits != 16)
    throw Error::validation("unsupported bit depth " + std::to_string(bits) + ": " +
                            path.string());
  if (rate == 0) throw Error::validation("wav sample rate is zero: " + path.string());
  if (data_off + data_len > bytes.size())
    throw Error::validation("truncated wav data chunk: " + path.string());

  const size_t bytes_per_sample = bits / 8;
  const size_t frame_bytes = bytes_per_sample * channels;
  const size_t n_frames = frame_bytes == 0 ? 0 : data_len / frame_bytes;

  std::vector<double> mono(n_frames);
  const uint8_t* d = bytes.data() + data_off;
  for (size_t i = 0; i < n_frames; ++i) {
    double acc = 0;
    for (unsigned c = 0; c < channels; ++c) {
      const uint8_t* sp = d + i * frame_bytes + c * bytes_per_sample;
      if (bits == 8) {
        acc += (static_cast<double>(*sp) - 128.0) / 128.0;
      } else {
        int16_t v = static_cast<int16_t>(sp[0] | (sp[1] << 8));
        acc += static_cast<double>(v) / 32768.0;
      }
    }
    mono[i] = acc / channels;
  }

  Signal sig;
  sig.sample_rate = target_rate;
  sig.samples = resample_linear(mono, static_cast<double>(rate), target_rate);
  return sig;
}

void write_wav16(const std::filesystem::path& path, const Signal& sig) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error::runtime("cannot write wav file: " + path.string());

  const uint32_t rate = static_cast<uint32_t>(std::llround(sig.sample_rate));
  const uint32_t data_len = static_cast<uint32_t>(sig.samples.size() * 2);
  const uint32_t riff_len = 36 + data_len;

  auto put_u32 = [&](uint32_t v) {
    char b[4] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                 static_cast<char>((v >> 16) & 0xff), static_cast<char>((v >> 24) & 0xff)};
    out.write(b, 4);
  };
  auto put_u16 = [&](uint16_t v) {
    char b[2] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff)};
    out.write(b, 2);
  };

  out.write("RIFF", 4);
  put_u32(riff_len);
  out.write("WAVE", 4);
  out.write("fmt ", 4);
  put_u32(16);
  put_u16(1);  // PCM
  put_u16(1);  // mono
  put_u32(rate);
  put_u32(rate * 2);
  put_u16(2);
  put_u16(16);
  out.write("data", 4);
  put_u32(data_len);
  for (double x : sig.samples) {
    double v = std::clamp(x, -1.0, 1.0);
    int16_t s = static_cast<int16_t>(std::lrint(v * 32767.0));
    char b[2] = {static_cast<char>(s & 0xff), static_cast<char>((s >> 8) & 0xff)};
    out.write(b, 2);
  }
  if (!out) throw Error::runtime("write failed: " + path.string());
}

}  // namespace fmss::acoustic
