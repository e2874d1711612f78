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

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace fmss::text {

enum class TokenVariant { stripped, with_punctuation };

struct TokenStream {
  std::vector<std::string> tokens;
  TokenVariant variant = TokenVariant::stripped;
};

// Unicode-aware word tokenizer with a documented contraction rule:
//   - tokens are maximal runs of word characters (ASCII alphanumerics plus
//     any non-ASCII code point outside common punctuation ranges);
//   - an apostrophe between two word characters starts a new token that
//     keeps the apostrophe, so "he's" -> [he, 's];
//   - every other punctuation character is a standalone single-char token;
//   - output is ASCII-lowercased.
// The stripped variant drops tokens that contain no word character.
TokenStream preprocess(const std::string& text, TokenVariant variant);

// idf(t) = ln((1 + N) / (1 + df(t))) + 1, vocabulary from training docs
// only, columns in lexicographic term order.
struct TfidfModel {
  std::vector<std::string> vocabulary;
  std::vector<double> idf;
  size_t fitted_on = 0;

  std::unordered_map<std::string, size_t> term_index;  // derived from vocabulary
};

TfidfModel fit_tfidf(std::span<const TokenStream> train_docs);

// Raw term counts * idf, L2-normalized. Out-of-vocabulary tokens are
// ignored; an all-OOV or empty document maps to the zero vector.
std::vector<double> transform_tfidf(const TfidfModel& model, const TokenStream& doc);

struct EmbeddingTable {
  size_t dimension = 0;
  std::unordered_map<std::string, std::vector<double>> vectors;
};

// Whitespace text format: an optional "count dim" header line, then one
// term followed by `dim` floats per line.
EmbeddingTable load_embeddings(const std::filesystem::path& path);

// Mean of the vectors of known tokens; unknown tokens are ignored and a
// document with no known token maps to the zero vector.
std::vector<double> embed_document(const TokenStream& doc, const EmbeddingTable& table);

struct ChunkAggregationConfig {
  size_t chunk_len = 512;
  double overlap = 0.5;     // fraction in [0, 1)
  size_t layer_count = 3;
};

// Sliding windows of chunk_len stepping by chunk_len*(1-overlap); the
// final partial window is included; n_tokens == 0 yields no windows.
std::vector<std::pair<size_t, size_t>> chunk_indices(size_t n_tokens,
                                                     const ChunkAggregationConfig& cfg);

// per_chunk_layers[chunk][layer] is a d-vector from an external encoder.
// Pools all (chunk, layer) vectors jointly and returns mean ++ population
// std (2d values).
std::vector<double> aggregate_chunks(
    const std::vector<std::vector<std::vector<double>>>& per_chunk_layers,
    const ChunkAggregationConfig& cfg);

}  // namespace fmss::text
