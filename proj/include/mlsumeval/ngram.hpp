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

#ifndef MLSUMEVAL_NGRAM_HPP_
#define MLSUMEVAL_NGRAM_HPP_

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mlsumeval/annotated.hpp"
#include "mlsumeval/tokenize.hpp"

namespace mlsumeval {

/// Precision/recall/F1 triple. All components lie in [0, 1].
struct MetricScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;

  /// F1 is the harmonic mean, 0 when P + R == 0.
  static MetricScore from_pr(double precision, double recall);
};

using Ngram = std::vector<std::string>;

/// Multiset of the contiguous n-grams of a token sequence.
struct NgramProfile {
  std::size_t n = 1;
  std::map<Ngram, std::size_t> counts;
  std::size_t total = 0;  // sum of counts

  /// Number of distinct n-grams.
  std::size_t unique() const { return counts.size(); }
  std::size_t count(const Ngram& g) const {
    auto it = counts.find(g);
    return it == counts.end() ? 0 : it->second;
  }
};

/// Throws DomainError when n == 0.
NgramProfile extract_ngrams(std::span<const std::string> tokens, std::size_t n);
NgramProfile extract_ngrams(const TokenList& tokens, std::size_t n);

/// Sum over n-grams of min(count in a, count in b).
std::size_t clipped_matches(const NgramProfile& a, const NgramProfile& b);

MetricScore rouge_n(std::span<const std::string> candidate,
                    std::span<const std::string> reference, std::size_t n);
MetricScore rouge_n(const TokenList& candidate, const TokenList& reference,
                    std::size_t n);

/// Length of the longest common subsequence.
std::size_t lcs_length(std::span<const std::string> a,
                       std::span<const std::string> b);

/// Whole-text LCS: P = L/|cand|, R = L/|ref|.
MetricScore rouge_l(std::span<const std::string> candidate,
                    std::span<const std::string> reference);
MetricScore rouge_l(const TokenList& candidate, const TokenList& reference);

/// Sentence-level BLEU: geometric mean of clipped precisions p_1..p_max_n
/// times the brevity penalty. Orders n >= 2 with zero matches use add-one
/// smoothing (m + 1) / (t + 1). An empty candidate scores 0.
double bleu(std::span<const std::string> candidate,
            std::span<const std::string> reference, std::size_t max_n = 4);
double bleu(const TokenList& candidate, const TokenList& reference,
            std::size_t max_n = 4);

/// BLEU over lemma streams. Throws ValidationError naming the first token
/// without a lemma.
double bleu_lemma(const AnnotatedDocument& candidate,
                  const AnnotatedDocument& reference, std::size_t max_n = 4);

/// chrF over extended grapheme clusters with whitespace removed:
/// per-order F_beta of clipped character n-gram precision and recall,
/// averaged over orders 1..max_n. Orders where neither side has an n-gram
/// are left out of the average; two empty strings score 1.
double chrf(std::string_view candidate, std::string_view reference,
            std::size_t max_n = 6, double beta = 2.0);

}  // namespace mlsumeval

#endif  // MLSUMEVAL_NGRAM_HPP_
