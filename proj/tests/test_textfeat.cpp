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

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <vector>

#include "doctest.h"

#include "fmss/error.hpp"
#include "fmss/textfeat.hpp"
#include "fmss/util.hpp"

namespace fs = std::filesystem;
using namespace fmss;
using namespace fmss::text;

namespace {

TokenStream doc(std::vector<std::string> tokens) {
  TokenStream s;
  s.tokens = std::move(tokens);
  return s;
}

fs::path temp_file(const std::string& name, const std::string& content) {
  const fs::path dir = fs::temp_directory_path() / "fmss_tests" / "textfeat";
  fs::create_directories(dir);
  const fs::path path = dir / name;
  std::ofstream out(path);
  out << content;
  return path;
}

}  // namespace

TEST_CASE("tokenizer splits contractions and handles both variants") {
  const auto stripped = preprocess("He's lovely!", TokenVariant::stripped);
  CHECK(stripped.tokens == std::vector<std::string>{"he", "'s", "lovely"});

  const auto with_punct = preprocess("He's lovely!", TokenVariant::with_punctuation);
  CHECK(with_punct.tokens == std::vector<std::string>{"he", "'s", "lovely", "!"});

  CHECK(preprocess("", TokenVariant::stripped).tokens.empty());
  CHECK(preprocess("   \t\n ", TokenVariant::with_punctuation).tokens.empty());
}

TEST_CASE("tokenizer lowercases, splits punctuation runs and keeps unicode words") {
  const auto t = preprocess("Well-behaved, CALM kids!!", TokenVariant::with_punctuation);
  CHECK(t.tokens == std::vector<std::string>{"well", "-", "behaved", ",", "calm", "kids",
                                             "!", "!"});
  const auto s = preprocess("Well-behaved, CALM kids!!", TokenVariant::stripped);
  CHECK(s.tokens == std::vector<std::string>{"well", "behaved", "calm", "kids"});

  // Non-ASCII letters stay inside word tokens; curly quotes behave like '.
  const auto u = preprocess("café isn’t bad…", TokenVariant::stripped);
  CHECK(u.tokens == std::vector<std::string>{"café", "isn", "’t", "bad"});
}

TEST_CASE("tfidf fit matches hand arithmetic") {
  const std::vector<TokenStream> docs = {doc({"a", "b"}), doc({"a"})};
  const auto model = fit_tfidf(docs);

  REQUIRE(model.vocabulary == std::vector<std::string>{"a", "b"});
  CHECK(model.fitted_on == 2);
  // idf(t) = ln((1+N)/(1+df)) + 1
  CHECK(model.idf[0] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(model.idf[1] == doctest::Approx(std::log(3.0 / 2.0) + 1.0).epsilon(1e-15));
}

TEST_CASE("tfidf single-document and empty-document fits") {
  const std::vector<TokenStream> single = {doc({"a"})};
  CHECK(fit_tfidf(single).idf[0] == doctest::Approx(1.0));

  const std::vector<TokenStream> with_empty = {doc({}), doc({"a"})};
  const auto model = fit_tfidf(with_empty);
  CHECK(model.vocabulary == std::vector<std::string>{"a"});
  CHECK(model.fitted_on == 2);

  const std::vector<TokenStream> all_empty = {doc({}), doc({})};
  CHECK_THROWS_AS(fit_tfidf(all_empty), Error);
  CHECK_THROWS_AS(fit_tfidf({}), Error);
}

TEST_CASE("tfidf transform matches hand arithmetic within 1e-12") {
  const std::vector<TokenStream> docs = {doc({"a", "b"}), doc({"a"})};
  const auto model = fit_tfidf(docs);
  const auto v = transform_tfidf(model, doc({"a", "a", "b"}));

  const double idf_b = std::log(1.5) + 1.0;
  const double norm = std::hypot(2.0 * 1.0, 1.0 * idf_b);
  REQUIRE(v.size() == 2);
  CHECK(std::abs(v[0] - 2.0 / norm) < 1e-12);
  CHECK(std::abs(v[1] - idf_b / norm) < 1e-12);

  // OOV-only and singleton documents.
  const auto oov = transform_tfidf(model, doc({"zzz", "qqq"}));
  CHECK(oov == std::vector<double>{0.0, 0.0});
  const auto one = transform_tfidf(model, doc({"a"}));
  CHECK(one[0] == doctest::Approx(1.0));
  CHECK(one[1] == 0.0);
}

TEST_CASE("tfidf vectors have unit or zero L2 norm") {
  Rng rng(12);
  std::vector<TokenStream> docs;
  const char* words[] = {"a", "b", "c", "d", "e", "f"};
  for (int i = 0; i < 10; ++i) {
    std::vector<std::string> tokens;
    const size_t n = rng.below(6);
    for (size_t j = 0; j < n; ++j) tokens.push_back(words[rng.below(6)]);
    docs.push_back(doc(tokens));
  }
  const auto model = fit_tfidf(docs);
  for (const auto& d : docs) {
    const auto v = transform_tfidf(model, d);
    const double norm = std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0));
    CHECK((std::abs(norm - 1.0) < 1e-12 || norm == 0.0));
  }
}

TEST_CASE("terms seen only in held-out documents get no column") {
  const std::vector<TokenStream> train = {doc({"seen", "words"}), doc({"more", "words"})};
  const auto model = fit_tfidf(train);
  CHECK(model.term_index.find("heldout") == model.term_index.end());
  const auto v = transform_tfidf(model, doc({"heldout", "words"}));
  // Only "words" contributes.
  CHECK(v[model.term_index.at("words")] == doctest::Approx(1.0));
}

TEST_CASE("embedding loader reads plain and headered formats") {
  const auto plain = temp_file("plain.txt", "a 1 0\nb 0 1\n");
  const auto t1 = load_embeddings(plain);
  CHECK(t1.dimension == 2);
  CHECK(t1.vectors.size() == 2);
  CHECK(t1.vectors.at("a") == std::vector<double>{1.0, 0.0});

  const auto headered = temp_file("headered.txt", "2 2\na 1 0\nb 0 1\n");
  const auto t2 = load_embeddings(headered);
  CHECK(t2.dimension == t1.dimension);
  CHECK(t2.vectors.at("b") == t1.vectors.at("b"));
}

TEST_CASE("embedding loader reports the offending line") {
  const auto ragged = temp_file("ragged.txt", "a 1 0\nb 1\n");
  CHECK_THROWS_WITH_AS(load_embeddings(ragged), doctest::Contains("line 2"), Error);

  const auto bad_float = temp_file("badfloat.txt", "a 1 x\n");
  CHECK_THROWS_WITH_AS(load_embeddings(bad_float), doctest::Contains("malformed float"),
                       Error);
}

TEST_CASE("document embedding averages known tokens and ignores unknowns") {
  EmbeddingTable table;
  table.dimension = 2;
  table.vectors["a"] = {1.0, 0.0};
  table.vectors["b"] = {0.0, 1.0};

  CHECK(embed_document(doc({"a"}), table) == std::vector<double>{1.0, 0.0});
  CHECK(embed_document(doc({"a", "b"}), table) == std::vector<double>{0.5, 0.5});
  CHECK(embed_document(doc({"a", "zzz"}), table) == std::vector<double>{1.0, 0.0});
  CHECK(embed_document(doc({"zzz"}), table) == std::vector<double>{0.0, 0.0});
}

TEST_CASE("document embedding is order-invariant and duplication-stable") {
  EmbeddingTable table;
  table.dimension = 3;
  Rng rng(5);
  const char* words[] = {"u", "v", "w", "x"};
  for (const char* word : words)
    table.vectors[word] = {rng.normal(), rng.normal(), rng.normal()};

  const auto d1 = doc({"u", "w", "x", "u"});
  auto shuffled = d1;
  std::swap(shuffled.tokens[0], shuffled.tokens[2]);
  const auto ordered = embed_document(d1, table);
  const auto swapped = embed_document(shuffled, table);
  for (size_t i = 0; i < ordered.size(); ++i)
    CHECK(ordered[i] == doctest::Approx(swapped[i]).epsilon(1e-12));

  auto doubled = d1;
  doubled.tokens.insert(doubled.tokens.end(), d1.tokens.begin(), d1.tokens.end());
  const auto e1 = embed_document(d1, table);
  const auto e2 = embed_document(doubled, table);
  for (size_t i = 0; i < e1.size(); ++i) CHECK(e1[i] == doctest::Approx(e2[i]).epsilon(1e-12));
}

TEST_CASE("chunk indices follow the documented stepping rule") {
  ChunkAggregationConfig cfg;  // 512 tokens, 50% overlap

  using P = std::pair<size_t, size_t>;
  CHECK(chunk_indices(0, cfg).empty());
  CHECK(chunk_indices(512, cfg) == std::vector<P>{{0, 512}});
  CHECK(chunk_indices(768, cfg) == std::vector<P>{{0, 512}, {256, 768}});
  CHECK(chunk_indices(1300, cfg) ==
        std::vector<P>{{0, 512}, {256, 768}, {512, 1024}, {768, 1280}, {1024, 1300}});
  CHECK(chunk_indices(100, cfg) == std::vector<P>{{0, 100}});
}

TEST_CASE("chunk windows cover the token range with the stated overlap") {
  Rng rng(71);
  for (int trial = 0; trial < 50; ++trial) {
    ChunkAggregationConfig cfg;
    cfg.chunk_len = 1 + rng.below(64);
    // Multiples of 1/64 keep chunk_len * overlap exact in doubles, so the
    // ceil/floor arithmetic below has no representation edge cases.
    cfg.overlap = static_cast<double>(rng.below(58)) / 64.0;
    const size_t n = rng.below(500);
    const auto windows = chunk_indices(n, cfg);

    if (n == 0) {
      CHECK(windows.empty());
      continue;
    }
    REQUIRE(!windows.empty());
    CHECK(windows.front().first == 0);
    CHECK(windows.back().second == n);
    for (size_t i = 0; i + 1 < windows.size(); ++i) {
      CHECK(windows[i + 1].first > windows[i].first);
      CHECK(windows[i + 1].first <= windows[i].second);  // no gaps
      // The stepping rule degenerates to step=1 when len*(1-overlap) < 1;
      // the stated overlap only applies outside that clamp.
      if (i + 2 < windows.size() && std::floor(cfg.chunk_len * (1.0 - cfg.overlap)) >= 1.0) {
        const size_t overlap = windows[i].second - windows[i + 1].first;
        CHECK(overlap == static_cast<size_t>(std::ceil(cfg.chunk_len * cfg.overlap)));
      }
    }
  }
}

TEST_CASE("chunk aggregation matches hand arithmetic") {
  ChunkAggregationConfig cfg;
  const std::vector<std::vector<std::vector<double>>> one_chunk = {
      {{1.0, 1.0}, {3.0, 3.0}, {5.0, 5.0}}};
  const auto v = aggregate_chunks(one_chunk, cfg);
  REQUIRE(v.size() == 4);
  CHECK(v[0] == doctest::Approx(3.0));
  CHECK(v[1] == doctest::Approx(3.0));
  const double expected_std = std::sqrt(8.0 / 3.0);
  CHECK(v[2] == doctest::Approx(expected_std).epsilon(1e-12));
  CHECK(v[3] == doctest::Approx(expected_std).epsilon(1e-12));
}

TEST_CASE("identical vectors aggregate to zero std") {
  ChunkAggregationConfig cfg;
  const std::vector<double> vec = {2.0, -1.0, 0.5};
  const std::vector<std::vector<std::vector<double>>> chunks = {{vec, vec, vec},
                                                                {vec, vec, vec}};
  const auto v = aggregate_chunks(chunks, cfg);
  CHECK(v[0] == doctest::Approx(2.0));
  CHECK(v[3] == doctest::Approx(0.0));
  CHECK(v[4] == doctest::Approx(0.0));
  CHECK(v[5] == doctest::Approx(0.0));
}

TEST_CASE("chunk aggregation rejects mismatched shapes") {
  ChunkAggregationConfig cfg;
  const std::vector<std::vector<std::vector<double>>> bad_dim = {
      {{1.0, 2.0}, {1.0, 2.0}, {1.0, 2.0}}, {{1.0, 2.0, 3.0}, {1.0, 2.0, 3.0}, {1.0, 2.0, 3.0}}};
  CHECK_THROWS_WITH_AS(aggregate_chunks(bad_dim, cfg),
                       doctest::Contains("dimension mismatch"), Error);

  const std::vector<std::vector<std::vector<double>>> bad_layers = {{{1.0}, {2.0}}};
  CHECK_THROWS_AS(aggregate_chunks(bad_layers, cfg), Error);
}

TEST_CASE("chunk aggregation is invariant to chunk order") {
  Rng rng(8);
  ChunkAggregationConfig cfg;
  std::vector<std::vector<std::vector<double>>> chunks;
  for (int c = 0; c < 4; ++c) {
    std::vector<std::vector<double>> layers;
    for (size_t l = 0; l < cfg.layer_count; ++l)
      layers.push_back({rng.normal(), rng.normal(), rng.normal()});
    chunks.push_back(std::move(layers));
  }
  const auto a = aggregate_chunks(chunks, cfg);
  std::reverse(chunks.begin(), chunks.end());
  const auto b = aggregate_chunks(chunks, cfg);
  for (size_t i = 0; i < a.size(); ++i) CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-12));
}
