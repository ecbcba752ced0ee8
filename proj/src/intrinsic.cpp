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

#include "mlsumeval/intrinsic.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <tuple>

#include "json.hpp"
#include "mlsumeval/ngram.hpp"
#include "mlsumeval/report.hpp"

namespace mlsumeval {

double novel_ngram_pct(std::span<const std::string> summary,
                       std::span<const std::string> article, std::size_t n,
                       Diagnostics* diag) {
  const auto s = extract_ngrams(summary, n);
  if (s.total == 0) {
    if (diag) {
      diag->warn("novel n-grams: summary has no " + std::to_string(n) +
                 "-grams; reporting 0");
    }
    return 0.0;
  }
  const auto a = extract_ngrams(article, n);
  std::size_t novel = 0;
  for (const auto& [gram, count] : s.counts) {
    if (a.counts.find(gram) == a.counts.end()) novel += count;
  }
  return 100.0 * static_cast<double>(novel) / static_cast<double>(s.total);
}

double redundancy(std::span<const std::string> summary, std::size_t n) {
  const auto p = extract_ngrams(summary, n);
  if (p.total == 0) return 0.0;
  const std::size_t repeats = p.total - p.unique();
  return 100.0 * static_cast<double>(repeats) / static_cast<double>(p.total);
}

double compression(std::size_t summary_tokens, std::size_t article_tokens,
                   Diagnostics* diag) {
  if (article_tokens == 0) throw DomainError("compression of an empty article");
  const double cmp = 100.0 * (1.0 - static_cast<double>(summary_tokens) /
                                        static_cast<double>(article_tokens));
  if (cmp < 0.0 && diag) {
    diag->warn("compression: summary (" + std::to_string(summary_tokens) +
               " tokens) longer than article (" + std::to_string(article_tokens) +
               ")");
  }
  return cmp;
}

double mean_token_length(const std::vector<TokenList>& summaries) {
  if (summaries.empty()) throw ValidationError("mean token length of no summaries");
  double total = 0.0;
  for (const auto& s : summaries) total += static_cast<double>(s.size());
  return total / static_cast<double>(summaries.size());
}

std::vector<IntrinsicReport> corpus_stats(const Corpus& corpus,
                                          const TokenizerSpec& spec,
                                          Diagnostics* diag) {
  if (spec.is_pretokenized()) {
    throw ValidationError("intrinsic statistics need a raw-text tokenizer");
  }
  struct Acc {
    IntrinsicReport report;
    std::vector<TokenList> summaries;
  };
  std::map<std::string, Acc> by_lang;
  for (const auto& rec : corpus) {
    if (rec.candidates.empty()) continue;
    auto& acc = by_lang[rec.lang];
    acc.report.lang = rec.lang;
    acc.report.family = rec.family;
    acc.report.resource = rec.resource;
    const auto article = token_texts(tokenize(rec.article, spec));
    for (const auto& cand : rec.candidates) {
      auto tokens = tokenize(cand.text, spec);
      const auto summary = token_texts(tokens);
      for (std::size_t n = 1; n <= 4; ++n) {
        acc.report.novel_pct[n - 1] += novel_ngram_pct(summary, article, n, diag);
      }
      for (std::size_t n = 1; n <= 2; ++n) {
        acc.report.red[n - 1] += redundancy(summary, n);
      }
      if (article.empty()) {
        throw DomainError("record " + rec.id + ": article has no tokens");
      }
      acc.report.cmp += compression(summary.size(), article.size(), diag);
      acc.summaries.push_back(std::move(tokens));
    }
  }
  std::vector<IntrinsicReport> out;
  for (auto& [lang, acc] : by_lang) {
    const double k = static_cast<double>(acc.summaries.size());
    for (auto& v : acc.report.novel_pct) v /= k;
    for (auto& v : acc.report.red) v /= k;
    acc.report.cmp /= k;
    acc.report.mean_token_length = mean_token_length(acc.summaries);
    acc.report.summaries = acc.summaries.size();
    out.push_back(acc.report);
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return std::make_tuple(a.family, -static_cast<int>(a.resource), a.lang) <
           std::make_tuple(b.family, -static_cast<int>(b.resource), b.lang);
  });
  return out;
}

std::string render_intrinsic_table(const std::vector<IntrinsicReport>& reports) {
  TextTable t({"Family", "Language (L/H)", "Novel 1-gram", "2-gram", "3-gram",
               "4-gram", "RED n=1", "n=2", "Compression", "Mean Token Length"});
  Family last{};
  bool first = true;
  for (const auto& r : reports) {
    const bool new_family = first || r.family != last;
    std::string lang = r.lang;
    std::transform(lang.begin(), lang.end(), lang.begin(), ::toupper);
    t.add_row({new_family ? std::string(to_string(r.family)) : "",
               lang + (r.resource == Resource::kHigh ? " (H)" : " (L)"),
               fixed(r.novel_pct[0]), fixed(r.novel_pct[1]),
               fixed(r.novel_pct[2]), fixed(r.novel_pct[3]), fixed(r.red[0]),
               fixed(r.red[1]), fixed(r.cmp), fixed(r.mean_token_length)});
    last = r.family;
    first = false;
  }
  return t.render();
}

std::string intrinsic_jsonl(const std::vector<IntrinsicReport>& reports) {
  std::string out;
  for (const auto& r : reports) {
    nlohmann::ordered_json j;
    j["lang"] = r.lang;
    j["family"] = std::string(to_string(r.family));
    j["resource"] = std::string(to_string(r.resource));
    j["novel_pct"] = {{"1", r.novel_pct[0]}, {"2", r.novel_pct[1]},
                      {"3", r.novel_pct[2]}, {"4", r.novel_pct[3]}};
    j["red"] = {{"1", r.red[0]}, {"2", r.red[1]}};
    j["cmp"] = r.cmp;
    j["mean_token_length"] = r.mean_token_length;
    j["summaries"] = r.summaries;
    out += j.dump() + "\n";
  }
  return out;
}

}  // namespace mlsumeval
