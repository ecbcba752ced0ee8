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

#include "mlsumeval/tokenize.hpp"

#include <algorithm>
#include <fstream>

#include "jsonl.hpp"
#include "mlsumeval/unicode.hpp"

namespace mlsumeval {

namespace {

// Words longer than this (in code points) map straight to the unknown token.
constexpr std::size_t kMaxWordChars = 100;

using unicode::decode;

// Splits on whitespace (and on non-word characters when requested).
TokenList split_words(std::string_view text, bool strip_nonword) {
  TokenList out;
  std::size_t start = std::string::npos;
  std::size_t last_end = 0;
  auto flush = [&](std::size_t end) {
    if (start != std::string::npos) {
      out.push_back({std::string(text.substr(start, end - start)), start, end});
      start = std::string::npos;
    }
  };
  for (const auto& cp : decode(text)) {
    const bool separator = unicode::is_whitespace(cp.value) ||
                           (strip_nonword && !unicode::is_word_char(cp.value));
    if (separator) {
      flush(cp.begin);
    } else if (start == std::string::npos) {
      start = cp.begin;
    }
    last_end = cp.end;
  }
  flush(last_end);
  return out;
}

// BERT basic tokenization: whitespace split, then every punctuation mark
// and CJK ideograph becomes its own word.
TokenList split_basic(std::string_view text, bool strip_nonword) {
  TokenList out;
  for (const Token& w : split_words(text, false)) {
    std::size_t start = std::string::npos;
    auto flush = [&](std::size_t end) {
      if (start != std::string::npos) {
        out.push_back({std::string(text.substr(start, end - start)), start, end});
        start = std::string::npos;
      }
    };
    for (const auto& cp : decode(w.text)) {
      const std::size_t b = w.begin + cp.begin;
      const std::size_t e = w.begin + cp.end;
      if (unicode::is_punctuation(cp.value) ||
          unicode::is_cjk_ideograph(cp.value)) {
        flush(b);
        const bool drop =
            strip_nonword && unicode::is_punctuation(cp.value);
        if (!drop) out.push_back({std::string(text.substr(b, e - b)), b, e});
      } else if (strip_nonword && !unicode::is_word_char(cp.value)) {
        flush(b);
      } else if (start == std::string::npos) {
        start = b;
      }
    }
    flush(w.end);
  }
  return out;
}

bool has_word_char(std::string_view s) {
  for (char32_t cp : unicode::code_points(s)) {
    if (unicode::is_word_char(cp)) return true;
  }
  return false;
}

std::string keep_word_chars(std::string_view s) {
  std::string out;
  for (char32_t cp : unicode::code_points(s)) {
    if (unicode::is_word_char(cp)) unicode::append_utf8(out, cp);
  }
  return out;
}

}  // namespace

SubwordVocab::SubwordVocab(std::vector<std::string> entries, bool cased,
                           std::string continuation_prefix,
                           std::string unknown_token, Diagnostics* diag)
    : cased_(cased),
      prefix_(std::move(continuation_prefix)),
      unk_(std::move(unknown_token)) {
  entries_.reserve(entries.size() + 1);
  std::size_t duplicates = 0;
  for (auto& e : entries) {
    if (e.empty()) continue;
    if (ids_.emplace(e, entries_.size()).second) {
      max_unit_bytes_ = std::max(max_unit_bytes_, e.size());
      entries_.push_back(std::move(e));
    } else {
      ++duplicates;
    }
  }
  if (entries_.empty()) throw ValidationError("subword vocabulary is empty");
  if (duplicates > 0 && diag) {
    diag->warn("subword vocabulary: dropped " + std::to_string(duplicates) +
               " duplicate entr" + (duplicates == 1 ? "y" : "ies"));
  }
  if (!ids_.count(unk_)) {
    ids_.emplace(unk_, entries_.size());
    entries_.push_back(unk_);
    unk_synthesized_ = true;
  }
}

std::size_t SubwordVocab::id(std::string_view unit) const {
  auto it = ids_.find(std::string(unit));
  return it == ids_.end() ? ids_.at(unk_) : it->second;
}

SubwordVocab load_subword_vocab(const std::filesystem::path& path, bool cased,
                                Diagnostics* diag) {
  auto in = detail::open_input(path);
  std::vector<std::string> entries;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    entries.push_back(line);
  }
  if (entries.empty()) {
    throw ValidationError("subword vocabulary file " + path.string() +
                          " is empty");
  }
  return SubwordVocab(std::move(entries), cased, "##", "[UNK]", diag);
}

TokenizerSpec TokenizerSpec::subword(std::shared_ptr<const SubwordVocab> vocab) {
  if (!vocab) throw ValidationError("subword tokenizer requires a vocabulary");
  TokenizerSpec spec{SubwordMode{vocab}};
  spec.lowercase = !vocab->cased();
  return spec;
}

std::string TokenizerSpec::name() const {
  struct Visitor {
    std::string operator()(const WhitespaceMode&) const { return "whitespace"; }
    std::string operator()(const CharacterMode&) const { return "char"; }
    std::string operator()(const SubwordMode&) const { return "subword"; }
    std::string operator()(const PretokenizedMode& m) const {
      return m.field == PretokenizedField::kLemma ? "pretok:lemma"
                                                  : "pretok:surface";
    }
  };
  return std::visit(Visitor{}, mode);
}

std::string prepare_text(std::string_view text, const TokenizerSpec& spec) {
  std::string out = spec.nfkc ? unicode::nfkc(text) : std::string(text);
  if (spec.lowercase) out = unicode::to_lower(out);
  return out;
}

TokenList tokenize_subword(std::string_view word, const SubwordVocab& vocab) {
  TokenList out;
  if (word.empty()) return out;
  const auto cps = decode(word);
  auto unknown = [&] {
    return TokenList{{vocab.unknown_token(), 0, word.size()}};
  };
  if (cps.size() > kMaxWordChars) return unknown();

  // Code point boundaries in bytes.
  std::vector<std::size_t> bounds;
  bounds.reserve(cps.size() + 1);
  for (const auto& cp : cps) bounds.push_back(cp.begin);
  bounds.push_back(word.size());

  std::size_t start = 0;  // index into bounds
  const std::size_t n = cps.size();
  std::string candidate;
  while (start < n) {
    std::size_t end = n;
    bool found = false;
    while (end > start) {
      const std::size_t b = bounds[start];
      const std::size_t len = bounds[end] - b;
      candidate.clear();
      if (start > 0) candidate = vocab.continuation_prefix();
      if (candidate.size() + len <= vocab.max_unit_bytes()) {
        candidate.append(word.substr(b, len));
        if (vocab.contains(candidate)) {
          out.push_back({candidate, b, bounds[end]});
          found = true;
          break;
        }
      }
      --end;
    }
    if (!found) return unknown();
    start = end;
  }
  return out;
}

TokenList tokenize(std::string_view raw, const TokenizerSpec& spec) {
  if (spec.is_pretokenized()) {
    throw ValidationError(
        "pretokenized tokenizer needs an annotated document, not raw text");
  }
  const std::string text = prepare_text(raw, spec);
  if (std::holds_alternative<WhitespaceMode>(spec.mode)) {
    return split_words(text, spec.strip_nonword);
  }
  if (std::holds_alternative<CharacterMode>(spec.mode)) {
    TokenList out;
    for (const auto& [b, e] : unicode::grapheme_clusters(text)) {
      std::string_view cluster(text.data() + b, e - b);
      if (unicode::all_whitespace(cluster)) continue;
      if (spec.strip_nonword && !has_word_char(cluster)) continue;
      out.push_back({std::string(cluster), b, e});
    }
    return out;
  }
  const auto& vocab = std::get<SubwordMode>(spec.mode).vocab;
  if (!vocab) throw ValidationError("subword tokenizer requires a vocabulary");
  TokenList out;
  for (const Token& w : split_basic(text, spec.strip_nonword)) {
    for (Token unit : tokenize_subword(w.text, *vocab)) {
      unit.begin += w.begin;
      unit.end += w.begin;
      out.push_back(std::move(unit));
    }
  }
  return out;
}

TokenList tokenize(const AnnotatedDocument& doc, const TokenizerSpec& spec) {
  if (!spec.is_pretokenized()) return tokenize(doc.source_text, spec);
  const auto field = std::get<PretokenizedMode>(spec.mode).field;
  TokenList out;
  out.reserve(doc.tokens.size());
  for (std::size_t i = 0; i < doc.tokens.size(); ++i) {
    const auto& t = doc.tokens[i];
    std::string text;
    if (field == PretokenizedField::kLemma) {
      if (!t.lemma || t.lemma->empty()) {
        throw ValidationError("token " + std::to_string(i) + " (\"" +
                              t.surface + "\") has no lemma");
      }
      text = *t.lemma;
    } else {
      text = t.surface;
    }
    text = prepare_text(text, spec);
    if (spec.strip_nonword) text = keep_word_chars(text);
    if (text.empty() || unicode::all_whitespace(text)) continue;
    out.push_back({std::move(text), t.begin, t.end});
  }
  return out;
}

std::vector<std::string> token_texts(const TokenList& tokens) {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(t.text);
  return out;
}

}  // namespace mlsumeval
