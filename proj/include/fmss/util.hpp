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
#include <functional>
#include <string>
#include <vector>

namespace fmss {

// Deterministic 64-bit generator (splitmix64). All randomness in the
// pipeline flows through this type so that results are bit-identical
// across platforms, standard libraries and thread schedules.
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed) {}

  uint64_t next_u64();
  double next_unit();                  // [0, 1), 53-bit resolution
  double uniform(double a, double b);  // [a, b)
  double normal();                     // standard normal (Box-Muller)
  size_t below(size_t n);              // [0, n), n > 0

  // Fisher-Yates shuffle.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (size_t i = v.size(); i > 1; --i) {
      size_t j = below(i);
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  uint64_t state_;
};

// Derives an independent stream seed from (base, index); used for
// per-interview and per-tree RNG streams.
uint64_t mix_seed(uint64_t base, uint64_t index);

// Runs fn(0..n-1) on up to `threads` workers. Each index is processed
// exactly once; callers must write results into index-addressed slots so
// the outcome does not depend on the schedule. threads == 0 resolves to
// the hardware concurrency.
void parallel_for(size_t n, unsigned threads, const std::function<void(size_t)>& fn);
unsigned resolve_threads(unsigned requested);

// Shortest decimal form that parses back to the exact same double.
std::string format_double(double v);

std::vector<std::string> split(const std::string& s, char delim);
std::string trim(const std::string& s);
std::string to_lower_ascii(std::string s);

uint64_t fnv1a(const std::string& s, uint64_t h = 1469598103934665603ull);

}  // namespace fmss
