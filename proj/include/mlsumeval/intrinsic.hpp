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

#ifndef MLSUMEVAL_INTRINSIC_HPP_
#define MLSUMEVAL_INTRINSIC_HPP_

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "mlsumeval/corpus.hpp"
#include "mlsumeval/error.hpp"
#include "mlsumeval/tokenize.hpp"

namespace mlsumeval {

/// Percentage of summary n-gram occurrences whose n-gram never occurs in
/// the article. An empty summary profile gives 0 (with a warning).
double novel_ngram_pct(std::span<const std::string> summary,
                       std::span<const std::string> article, std::size_t n,
                       Diagnostics* diag = nullptr);

/// RED = 100 * sum(f_i - 1) / sum(f_i) over the summary's n-gram counts.
double redundancy(std::span<const std::string> summary, std::size_t n);

/// CMP = 100 * (1 - |S| / |A|). Throws DomainError for an empty article;
/// negative values (summary longer than article) are warned about.
double compression(std::size_t summary_tokens, std::size_t article_tokens,
                   Diagnostics* diag = nullptr);

/// Mean token count. Throws ValidationError for an empty list.
double mean_token_length(const std::vector<TokenList>& summaries);

/// Per-language summary statistics, averaged over every candidate summary.
struct IntrinsicReport {
  std::string lang;
  Family family = Family::kIsolating;
  Resource resource = Resource::kLow;
  std::array<double, 4> novel_pct{};  // n = 1..4
  std::array<double, 2> red{};        // n = 1, 2
  double cmp = 0.0;
  double mean_token_length = 0.0;
  std::size_t summaries = 0;
};

/// One report per language, ordered by family (isolating, agglutinative,
/// low fusional, high fusional), high resource first, then code.
/// Pretokenized specs are rejected.
std::vector<IntrinsicReport> corpus_stats(const Corpus& corpus,
                                          const TokenizerSpec& spec,
                                          Diagnostics* diag = nullptr);

/// Aligned text table with the columns Family, Language (L/H), novel
/// 1-4-grams, RED n=1,2, compression and mean token length.
std::string render_intrinsic_table(const std::vector<IntrinsicReport>& reports);
std::string intrinsic_jsonl(const std::vector<IntrinsicReport>& reports);

}  // namespace mlsumeval

#endif  // MLSUMEVAL_INTRINSIC_HPP_
