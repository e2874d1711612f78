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

#include "fmss/textfeat.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include "fmss/error.hpp"
#include "fmss/util.hpp"

namespace fmss::text {

namespace {

// Minimal UTF-8 decoder; invalid bytes fall through as single code points.
size_t decode_utf8(const std::string& s, size_t pos, uint32_t& cp) {
  const unsigned char c = static_cast<unsigned char>(s[pos]);
  if (c < 0x80) {
    cp = c;
    return 1;
  }
  size_t len = 0;
  if ((c & 0xe0) == 0xc0) len = 2;
  else if ((c & 0xf0) == 0xe0) len = 3;
  else if ((c & 0xf8) == 0xf0) len = 4;
  if (len == 0 || pos + len > s.size()) {
    cp = c;
    return 1;
  }
  uint32_t v = c & (0x7f >> len);
  for (size_t i = 1; i < len; ++i) {
    const unsigned char cc = static_cast<unsigned char>(s[pos + i]);
    if ((cc & 0xc0) != 0x80) {
      cp = c;
      return 1;
    }
    v = (v << 6) | (cc & 0x3f);
  }
  cp = v;
  return len;
}

void append_utf8(std::string& out, uint32_t cp) {
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xc0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3f));
  } else if (cp < 0x10000) {
    out += static_cast<char>(0xe0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3f));
    out += static_cast<char>(0x80 | (cp & 0x3f));
  } else {
    out += static_cast<char>(0xf0 | (cp >> 18));
    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3f));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3f));
    out += static_cast<char>(0x80 | (cp & 0x3f));
  }
}

bool is_space_cp(uint32_t cp) {
  if (cp == ' ' || cp == '\t' || cp == '\n' || cp == '\r' || cp == '\f' || cp == '\v')
    return true;
  if (cp == 0xa0 || cp == 0x202f || cp == 0x3000) return true;
  if (cp >= 0x2000 && cp <= 0x200a) return true;
  return cp == 0x2028 || cp == 0x2029;
}

bool is_apostrophe_cp(uint32_t cp) { return cp == '\'' || cp == 0x2019; }

bool is_word_cp(uint32_t cp) {
  if (cp < 0x80) {
    return (cp >= '0' && cp <= '9') || (cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z');
  }
  // Non-ASCII: word character unless common punctuation.
  if (cp >= 0x2000 && cp <= 0x206f) return false;  // general punctuation block
  if (cp == 0xa0 || cp == 0x202f || cp == 0x3000) return false;
  if (cp == 0xab || cp == 0xbb || cp == 0xa1 || cp == 0xbf) return false;
  return true;
}

uint32_t lower_cp(uint32_t cp) {
  if (cp >= 'A' && cp <= 'Z') return cp + 32;
  return cp;
}

}  // namespace

TokenStream preprocess(const std::string& text, TokenVariant variant) {
  TokenStream out;
  out.variant = variant;

  struct Tok {
    std::string s;
    bool has_word = false;
  };
  std::vector<Tok> toks;
  Tok cur;
  bool prev_word = false;

  auto flush = [&]() {
    if (!cur.s.empty()) toks.push_back(std::move(cur));
    cur = Tok{};
  };

  size_t pos = 0;
  while (pos < text.size()) {
    uint32_t cp = 0;
    const size_t len = decode_utf8(text, pos, cp);

    if (is_space_cp(cp)) {
      flush();
      prev_word = false;
      pos += len;
      continue;
    }

    if (is_word_cp(cp)) {
      append_utf8(cur.s, lower_cp(cp));
      cur.has_word = true;
      prev_word = true;
      pos += len;
      continue;
    }

    if (is_apostrophe_cp(cp)) {
      // letter'letter -> split before the apostrophe, keep it on the suffix
      uint32_t next_cp = 0;
      bool next_word = false;
      if (pos + len < text.size()) {
        decode_utf8(text, pos + len, next_cp);
        next_word = is_word_cp(next_cp);
      }
      if (prev_word && next_word) {
        flush();
        append_utf8(cur.s, cp);
        cur.has_word = true;  // the suffix will contain word characters
        prev_word = false;
        pos += len;
        continue;
      }
    }

    // Any other punctuation: standalone single-character token.
    flush();
    Tok p;
    append_utf8(p.s, cp);
    toks.push_back(std::move(p));
    prev_word = false;
    pos += len;
  }
  flush();

  for (auto& t : toks) {
    if (variant == TokenVariant::stripped && !t.has_word) continue;
    out.tokens.push_back(std::move(t.s));
  }
  return out;
}

TfidfModel fit_tfidf(std::span<const TokenStream> train_docs) {
  if (train_docs.empty()) throw Error::validation("fit_tfidf: no training documents");

  std::map<std::string, size_t> df;  // ordered -> lexicographic columns
  bool any_token = false;
  for (const auto& doc : train_docs) {
    std::map<std::string, bool> seen;
    for (const auto& t : doc.tokens) {
      any_token = true;
      if (!seen.emplace(t, true).second) continue;
      ++df[t];
    }
  }
  if (!any_token) throw Error::validation("fit_tfidf: all training documents are empty");

  TfidfModel model;
  model.fitted_on = train_docs.size();
  const double n = static_cast<double>(model.fitted_on);
  for (const auto& [term, count] : df) {
    model.term_index.emplace(term, model.vocabulary.size());
    model.vocabulary.push_back(term);
    model.idf.push_back(std::log((1.0 + n) / (1.0 + static_cast<double>(count))) + 1.0);
  }
  return model;
}

std::vector<double> transform_tfidf(const TfidfModel& model, const TokenStream& doc) {
  std::vector<double> v(model.vocabulary.size(), 0.0);
  for (const auto& t : doc.tokens) {
    auto it = model.term_index.find(t);
    if (it == model.term_index.end()) continue;  // OOV ignored
    v[it->second] += 1.0;
  }
  double norm_sq = 0;
  for (size_t i = 0; i < v.size(); ++i) {
    v[i] *= model.idf[i];
    norm_sq += v[i] * v[i];
  }
  if (norm_sq > 0) {
    const double inv = 1.0 / std::sqrt(norm_sq);
    for (auto& x : v) x *= inv;
  }
  return v;
}

EmbeddingTable load_embeddings(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error::validation("cannot open embedding table: " + path.string());

  EmbeddingTable table;
  std::string line;
  size_t line_no = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;

    std::istringstream ss(line);
    std::vector<std::string> fields;
    std::string f;
    while (ss >> f) fields.push_back(f);

    if (first) {
      first = false;
      // A leading "count dim" header is tolerated.
      if (fields.size() == 2) {
        char* e1 = nullptr;
        char* e2 = nullptr;
        long a = std::strtol(fields[0].c_str(), &e1, 10);
        long b = std::strtol(fields[1].c_str(), &e2, 10);
        if (*e1 == '\0' && *e2 == '\0' && a >= 0 && b > 0) continue;
      }
    }

    if (fields.size() < 2)
      throw Error::validation("embedding table line " + std::to_string(line_no) +
                              ": expected term and vector");
    std::vector<double> vec;
    vec.reserve(fields.size() - 1);
    for (size_t i = 1; i < fields.size(); ++i) {
      char* end = nullptr;
      double x = std::strtod(fields[i].c_str(), &end);
      if (*end != '\0' || !std::isfinite(x))
        throw Error::validation("embedding table line " + std::to_string(line_no) +
                                ": malformed float '" + fields[i] + "'");
      vec.push_back(x);
    }
    if (table.dimension == 0)
      table.dimension = vec.size();
    else if (vec.size() != table.dimension)
      throw Error::validation("embedding table line " + std::to_string(line_no) +
                              ": dimension " + std::to_string(vec.size()) +
                              " does not match " + std::to_string(table.dimension));
    table.vectors[fields[0]] = std::move(vec);
  }
  if (table.vectors.empty())
    throw Error::validation("embedding table has no entries: " + path.string());
  return table;
}

std::vector<double> embed_document(const TokenStream& doc, const EmbeddingTable& table) {
  std::vector<double> acc(table.dimension, 0.0);
  size_t known = 0;
  for (const auto& t : doc.tokens) {
    auto it = table.vectors.find(t);
    if (it == table.vectors.end()) continue;  // unknown words ignored
    for (size_t i = 0; i < table.dimension; ++i) acc[i] += it->second[i];
    ++known;
  }
  if (known > 0)
    for (auto& x : acc) x /= static_cast<double>(known);
  return acc;
}

std::vector<std::pair<size_t, size_t>> chunk_indices(size_t n_tokens,
                                                     const ChunkAggregationConfig& cfg) {
  if (cfg.chunk_len < 1) throw Error::validation("chunk_indices: chunk_len must be >= 1");
  if (cfg.overlap < 0 || cfg.overlap >= 1)
    throw Error::validation("chunk_indices: overlap must be in [0, 1)");

  std::vector<std::pair<size_t, size_t>> out;
  if (n_tokens == 0) return out;

  const double len = static_cast<double>(cfg.chunk_len);
  size_t step = static_cast<size_t>(std::floor(len * (1.0 - cfg.overlap)));
  if (step == 0) step = 1;

  for (size_t start = 0;; start += step) {
    const size_t end = std::min(start + cfg.chunk_len, n_tokens);
    out.emplace_back(start, end);
    if (start + cfg.chunk_len >= n_tokens) break;
  }
  return out;
}

std::vector<double> aggregate_chunks(
    const std::vector<std::vector<std::vector<double>>>& per_chunk_layers,
    const ChunkAggregationConfig& cfg) {
  if (per_chunk_layers.empty())
    throw Error::validation("aggregate_chunks: no chunks");

  size_t dim = 0;
  size_t count = 0;
  for (const auto& chunk : per_chunk_layers) {
    if (chunk.size() != cfg.layer_count)
      throw Error::validation("aggregate_chunks: expected " + std::to_string(cfg.layer_count) +
                              " layers per chunk, got " + std::to_string(chunk.size()));
    for (const auto& layer : chunk) {
      if (dim == 0) dim = layer.size();
      if (layer.size() != dim)
        throw Error::validation("aggregate_chunks: vector dimension mismatch (" +
                                std::to_string(layer.size()) + " vs " + std::to_string(dim) +
                                ")");
      ++count;
    }
  }
  if (dim == 0) throw Error::validation("aggregate_chunks: zero-dimensional vectors");

  std::vector<double> mean(dim, 0.0), sq(dim, 0.0);
  for (const auto& chunk : per_chunk_layers)
    for (const auto& layer : chunk)
      for (size_t i = 0; i < dim; ++i) {
        mean[i] += layer[i];
        sq[i] += layer[i] * layer[i];
      }

  std::vector<double> out(2 * dim, 0.0);
  const double n = static_cast<double>(count);
  for (size_t i = 0; i < dim; ++i) {
    const double m = mean[i] / n;
    double var = sq[i] / n - m * m;
    if (var < 0) var = 0;
    out[i] = m;
    out[dim + i] = std::sqrt(var);
  }
  return out;
}

}  // namespace fmss::text
