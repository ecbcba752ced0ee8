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

#include "mlsumeval/ngram.hpp"

#include <algorithm>
#include <cmath>

#include "mlsumeval/error.hpp"

namespace mlsumeval {

namespace {

double ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

MetricScore MetricScore::from_pr(double precision, double recall) {
  const double sum = precision + recall;
  return {precision, recall, sum > 0.0 ? 2.0 * precision * recall / sum : 0.0};
}

NgramProfile extract_ngrams(std::span<const std::string> tokens,
                            std::size_t n) {
  if (n == 0) throw DomainError("n-gram order must be at least 1");
  NgramProfile profile;
  profile.n = n;
  if (tokens.size() < n) return profile;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
    ++profile.counts[Ngram(tokens.begin() + i, tokens.begin() + i + n)];
  }
  profile.total = tokens.size() - n + 1;
  return profile;
}

NgramProfile extract_ngrams(const TokenList& tokens, std::size_t n) {
  const auto texts = token_texts(tokens);
  return extract_ngrams(texts, n);
}

std::size_t clipped_matches(const NgramProfile& a, const NgramProfile& b) {
  std::size_t matched = 0;
  for (const auto& [gram, count] : a.counts) {
    matched += std::min(count, b.count(gram));
  }
  return matched;
}

MetricScore rouge_n(std::span<const std::string> candidate,
                    std::span<const std::string> reference, std::size_t n) {
  const auto cand = extract_ngrams(candidate, n);
  const auto ref = extract_ngrams(reference, n);
  const std::size_t matched = clipped_matches(cand, ref);
  return MetricScore::from_pr(ratio(matched, cand.total),
                              ratio(matched, ref.total));
}

MetricScore rouge_n(const TokenList& candidate, const TokenList& reference,
                    std::size_t n) {
  return rouge_n(token_texts(candidate), token_texts(reference), n);
}

std::size_t lcs_length(std::span<const std::string> a,
                       std::span<const std::string> b) {
  if (a.empty() || b.empty()) return 0;
  std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1
                                    : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

MetricScore rouge_l(std::span<const std::string> candidate,
                    std::span<const std::string> reference) {
  const std::size_t l = lcs_length(candidate, reference);
  return MetricScore::from_pr(ratio(l, candidate.size()),
                              ratio(l, reference.size()));
}

MetricScore rouge_l(const TokenList& candidate, const TokenList& reference) {
  return rouge_l(token_texts(candidate), token_texts(reference));
}

double bleu(std::span<const std::string> candidate,
            std::span<const std::string> reference, std::size_t max_n) {
  if (max_n == 0) throw DomainError("BLEU max order must be at least 1");
  if (candidate.empty()) return 0.0;
  double log_sum = 0.0;
  for (std::size_t n = 1; n <= max_n; ++n) {
    const auto cand = extract_ngrams(candidate, n);
    const auto ref = extract_ngrams(reference, n);
    double matched = static_cast<double>(clipped_matches(cand, ref));
    double total = static_cast<double>(cand.total);
    if (n >= 2 && matched == 0.0) {
      matched += 1.0;
      total += 1.0;
    }
    if (matched == 0.0) return 0.0;
    log_sum += std::log(matched / total);
  }
  const double c = static_cast<double>(candidate.size());
  const double r = static_cast<double>(reference.size());
  const double bp = c >= r ? 1.0 : std::exp(1.0 - r / c);
  return std::min(1.0, bp * std::exp(log_sum / static_cast<double>(max_n)));
}

double bleu(const TokenList& candidate, const TokenList& reference,
            std::size_t max_n) {
  return bleu(token_texts(candidate), token_texts(reference), max_n);
}

double bleu_lemma(const AnnotatedDocument& candidate,
                  const AnnotatedDocument& reference, std::size_t max_n) {
  const auto spec = TokenizerSpec::pretokenized(PretokenizedField::kLemma);
  return bleu(tokenize(candidate, spec), tokenize(reference, spec), max_n);
}

double chrf(std::string_view candidate, std::string_view reference,
            std::size_t max_n, double beta) {
  if (max_n == 0) throw DomainError("chrF max order must be at least 1");
  if (!(beta > 0.0)) throw DomainError("chrF beta must be positive");
  const auto spec = TokenizerSpec::character();
  const auto cand = token_texts(tokenize(candidate, spec));
  const auto ref = token_texts(tokenize(reference, spec));
  if (cand.empty() && ref.empty()) return 1.0;
  const double b2 = beta * beta;
  double sum = 0.0;
  std::size_t orders = 0;
  for (std::size_t n = 1; n <= max_n; ++n) {
    const auto pc = extract_ngrams(cand, n);
    const auto pr = extract_ngrams(ref, n);
    if (pc.total == 0 && pr.total == 0) continue;
    ++orders;
    const std::size_t matched = clipped_matches(pc, pr);
    const double p = ratio(matched, pc.total);
    const double r = ratio(matched, pr.total);
    const double den = b2 * p + r;
    sum += den > 0.0 ? (1.0 + b2) * p * r / den : 0.0;
  }
  return sum / static_cast<double>(orders);
}

}  // namespace mlsumeval
