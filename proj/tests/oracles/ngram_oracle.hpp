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

// Brute-force reference implementations of ROUGE counting, written for
// clarity rather than speed: every n-gram is compared element by element and
// the LCS is found by trying every subsequence of the shorter side.

#ifndef MLSUMEVAL_TESTS_ORACLES_NGRAM_ORACLE_HPP_
#define MLSUMEVAL_TESTS_ORACLES_NGRAM_ORACLE_HPP_

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace mlsumeval::oracle {

using Tokens = std::vector<std::string>;

inline bool window_equal(const Tokens& a, std::size_t i, const Tokens& b,
                         std::size_t j, std::size_t n) {
  for (std::size_t k = 0; k < n; ++k) {
    if (a[i + k] != b[j + k]) return false;
  }
  return true;
}

inline std::size_t window_count(const Tokens& seq, std::size_t n) {
  return seq.size() >= n ? seq.size() - n + 1 : 0;
}

// Occurrences of the n-gram a[i, i+n) in seq.
inline std::size_t occurrences(const Tokens& a, std::size_t i,
                               const Tokens& seq, std::size_t n) {
  std::size_t count = 0;
  for (std::size_t j = 0; j < window_count(seq, n); ++j) {
    if (window_equal(a, i, seq, j, n)) ++count;
  }
  return count;
}

/// Sum over distinct candidate n-grams of min(count in cand, count in ref).
inline std::size_t clipped_matches(const Tokens& cand, const Tokens& ref,
                                   std::size_t n) {
  std::size_t matched = 0;
  for (std::size_t i = 0; i < window_count(cand, n); ++i) {
    bool seen_before = false;
    for (std::size_t p = 0; p < i && !seen_before; ++p) {
      seen_before = window_equal(cand, p, cand, i, n);
    }
    if (seen_before) continue;
    matched += std::min(occurrences(cand, i, cand, n),
                        occurrences(cand, i, ref, n));
  }
  return matched;
}

struct PRF {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

inline PRF prf(std::size_t matched, std::size_t cand_total,
               std::size_t ref_total) {
  PRF out;
  out.precision = cand_total ? static_cast<double>(matched) / cand_total : 0.0;
  out.recall = ref_total ? static_cast<double>(matched) / ref_total : 0.0;
  const double s = out.precision + out.recall;
  out.f1 = s > 0.0 ? 2.0 * out.precision * out.recall / s : 0.0;
  return out;
}

inline PRF rouge_n(const Tokens& cand, const Tokens& ref, std::size_t n) {
  return prf(clipped_matches(cand, ref, n), window_count(cand, n),
             window_count(ref, n));
}

inline bool is_subsequence(const Tokens& sub, const Tokens& seq) {
  std::size_t k = 0;
  for (std::size_t i = 0; i < seq.size() && k < sub.size(); ++i) {
    if (seq[i] == sub[k]) ++k;
  }
  return k == sub.size();
}

/// Longest common subsequence by exhaustive search over the subsets of the
/// shorter sequence (feasible for lengths up to ~20).
inline std::size_t lcs_exhaustive(const Tokens& a, const Tokens& b) {
  const Tokens& s = a.size() <= b.size() ? a : b;
  const Tokens& t = a.size() <= b.size() ? b : a;
  std::size_t best = 0;
  const std::uint32_t limit = std::uint32_t{1} << s.size();
  for (std::uint32_t mask = 0; mask < limit; ++mask) {
    const auto bits = static_cast<std::size_t>(__builtin_popcount(mask));
    if (bits <= best) continue;
    Tokens sub;
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (mask & (std::uint32_t{1} << i)) sub.push_back(s[i]);
    }
    if (is_subsequence(sub, t)) best = bits;
  }
  return best;
}

inline PRF rouge_l(const Tokens& cand, const Tokens& ref) {
  return prf(lcs_exhaustive(cand, ref), cand.size(), ref.size());
}

}  // namespace mlsumeval::oracle

#endif  // MLSUMEVAL_TESTS_ORACLES_NGRAM_ORACLE_HPP_
