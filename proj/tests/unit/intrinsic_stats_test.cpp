// Copyright 2026 The mlsumeval Authors.
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

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "mlsumeval/corpus.hpp"
#include "mlsumeval/error.hpp"
#include "mlsumeval/intrinsic.hpp"
#include "mlsumeval/language.hpp"
#include "mlsumeval/tokenize.hpp"
#include "support/fixtures.hpp"

namespace mlsumeval {
namespace {

using testing::words;

// Independent n-gram counting over joined keys.
std::map<std::string, int> gram_counts(const std::vector<std::string>& t,
                                       std::size_t n) {
  std::map<std::string, int> out;
  for (std::size_t i = 0; i + n <= t.size(); ++i) {
    std::string key;
    for (std::size_t j = i; j < i + n; ++j) key += t[j] + '\x1f';
    ++out[key];
  }
  return out;
}

double novel_oracle(const std::vector<std::string>& s,
                    const std::vector<std::string>& a, std::size_t n) {
  const auto sc = gram_counts(s, n), ac = gram_counts(a, n);
  int total = 0, novel = 0;
  for (const auto& [g, c] : sc) {
    total += c;
    if (!ac.count(g)) novel += c;
  }
  return total ? 100.0 * novel / total : 0.0;
}

double red_oracle(const std::vector<std::string>& s, std::size_t n) {
  const auto sc = gram_counts(s, n);
  int total = 0, rep = 0;
  for (const auto& [g, c] : sc) {
    total += c;
    rep += c - 1;
  }
  return total ? 100.0 * rep / total : 0.0;
}

TEST(NovelNgrams, Examples) {
  const auto s = words("a b c"), a = words("a x y");
  EXPECT_NEAR(novel_ngram_pct(s, a, 1), 200.0 / 3.0, 1e-12);
  EXPECT_EQ(novel_ngram_pct(s, words("c b a"), 1), 0.0);
  EXPECT_EQ(novel_ngram_pct(s, words("c b a"), 2), 100.0);
  EXPECT_EQ(novel_ngram_pct(s, s, 3), 0.0);
  // Repeated novel grams count once per occurrence.
  EXPECT_NEAR(novel_ngram_pct(words("z z a"), words("a"), 1), 200.0 / 3.0, 1e-12);
}

TEST(NovelNgrams, ShortSummaryWarns) {
  Diagnostics diag;
  EXPECT_EQ(novel_ngram_pct(words("a b"), words("a b c"), 3, &diag), 0.0);
  EXPECT_EQ(diag.warnings().size(), 1u);
}

TEST(Redundancy, Examples) {
  EXPECT_NEAR(redundancy(words("a a a"), 1), 200.0 / 3.0, 1e-12);
  EXPECT_NEAR(redundancy(words("a a b"), 1), 100.0 / 3.0, 1e-12);
  EXPECT_EQ(redundancy(words("a b c d"), 1), 0.0);
  EXPECT_NEAR(redundancy(words("a b a b"), 2), 100.0 / 3.0, 1e-12);
  EXPECT_EQ(redundancy(words("a"), 2), 0.0);
}

TEST(Compression, Examples) {
  EXPECT_NEAR(compression(4, 20), 80.0, 1e-12);
  EXPECT_EQ(compression(20, 20), 0.0);
  EXPECT_EQ(compression(0, 20), 100.0);
  EXPECT_THROW(compression(3, 0), DomainError);
  Diagnostics diag;
  EXPECT_NEAR(compression(30, 20, &diag), -50.0, 1e-12);
  EXPECT_EQ(diag.warnings().size(), 1u);
}

TEST(MeanTokenLength, Examples) {
  const auto spec = TokenizerSpec::whitespace();
  EXPECT_DOUBLE_EQ(mean_token_length({tokenize("a b c", spec),
                                      tokenize("d", spec)}),
                   2.0);
  EXPECT_THROW(mean_token_length({}), ValidationError);
}

TEST(Intrinsic, RandomAgainstOracle) {
  std::mt19937_64 gen(17);
  std::uniform_int_distribution<int> len(0, 15), sym(0, 4);
  for (int k = 0; k < 300; ++k) {
    std::vector<std::string> s(len(gen)), a(len(gen) + 1);
    for (auto& x : s) x = std::string(1, static_cast<char>('a' + sym(gen)));
    for (auto& x : a) x = std::string(1, static_cast<char>('a' + sym(gen)));
    for (std::size_t n = 1; n <= 4; ++n) {
      EXPECT_NEAR(novel_ngram_pct(s, a, n), novel_oracle(s, a, n), 1e-12);
      EXPECT_NEAR(redundancy(s, n), red_oracle(s, n), 1e-12);
    }
  }
}

TEST(CorpusStats, ToyCorpusMatchesRecomputation) {
  const auto corpus = load_corpus(testing::toy_dir() / "corpus.jsonl");
  const auto spec = TokenizerSpec::whitespace();
  const auto reports = corpus_stats(corpus, spec);
  ASSERT_EQ(reports.size(), 8u);

  std::map<std::string, std::vector<std::vector<double>>> rows;
  for (const auto& rec : corpus) {
    const auto a = words(rec.article);
    for (const auto& c : rec.candidates) {
      const auto s = words(c.text);
      std::vector<double> row;
      for (std::size_t n = 1; n <= 4; ++n) row.push_back(novel_oracle(s, a, n));
      row.push_back(red_oracle(s, 1));
      row.push_back(red_oracle(s, 2));
      row.push_back(100.0 * (1.0 - double(s.size()) / double(a.size())));
      row.push_back(double(s.size()));
      rows[rec.lang].push_back(row);
    }
  }
  for (const auto& r : reports) {
    const auto& lang_rows = rows.at(r.lang);
    std::vector<double> mean(8, 0.0);
    for (const auto& row : lang_rows) {
      for (std::size_t i = 0; i < 8; ++i) mean[i] += row[i] / lang_rows.size();
    }
    EXPECT_EQ(r.summaries, lang_rows.size());
    for (std::size_t n = 0; n < 4; ++n) {
      EXPECT_NEAR(r.novel_pct[n], mean[n], 1e-9) << r.lang;
    }
    EXPECT_NEAR(r.red[0], mean[4], 1e-9);
    EXPECT_NEAR(r.red[1], mean[5], 1e-9);
    EXPECT_NEAR(r.cmp, mean[6], 1e-9);
    EXPECT_NEAR(r.mean_token_length, mean[7], 1e-9);
    EXPECT_EQ(r.family, find_language(r.lang)->family);
  }
  // Family order, high resource first within a family.
  for (std::size_t i = 1; i < reports.size(); ++i) {
    const auto& p = reports[i - 1];
    const auto& q = reports[i];
    EXPECT_TRUE(p.family < q.family ||
                (p.family == q.family && p.resource >= q.resource));
  }
}

TEST(CorpusStats, RejectsPretokenizedAndEmptyArticle) {
  Corpus corpus(1);
  corpus[0].id = "x";
  corpus[0].lang = "en";
  corpus[0].article = "  ";
  corpus[0].reference = "r";
  corpus[0].candidates.push_back({"s", "t"});
  EXPECT_THROW(corpus_stats(corpus, TokenizerSpec::pretokenized(
                                        PretokenizedField::kSurface)),
               ValidationError);
  EXPECT_THROW(corpus_stats(corpus, TokenizerSpec::whitespace()), DomainError);
}

TEST(CorpusStats, TableAndJsonl) {
  const auto corpus = load_corpus(testing::toy_dir() / "corpus.jsonl");
  const auto reports = corpus_stats(corpus, TokenizerSpec::whitespace());
  const std::string table = render_intrinsic_table(reports);
  std::istringstream in(table);
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header.find("Family"), 0u);
  EXPECT_NE(header.find("Compression"), std::string::npos);
  EXPECT_NE(table.find("EN (H)"), std::string::npos);
  EXPECT_NE(table.find("YO (L)"), std::string::npos);
  std::size_t lines = 0;
  for (std::string l; std::getline(in, l);) ++lines;
  EXPECT_GE(lines, reports.size());
  const std::string jsonl = intrinsic_jsonl(reports);
  EXPECT_EQ(std::count(jsonl.begin(), jsonl.end(), '\n'),
            static_cast<long>(reports.size()));
  EXPECT_NE(jsonl.find("\"lang\":\"en\""), std::string::npos);
}

}  // namespace
}  // namespace mlsumeval
