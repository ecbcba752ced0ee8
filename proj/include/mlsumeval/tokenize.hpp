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

#ifndef MLSUMEVAL_TOKENIZE_HPP_
#define MLSUMEVAL_TOKENIZE_HPP_

#include <cstddef>
#include <filesystem>
#include <memory>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

#include "mlsumeval/annotated.hpp"
#include "mlsumeval/error.hpp"

namespace mlsumeval {

/// A token and its byte span [begin, end) in the text the tokenizer saw
/// (after normalization and case folding). Subword units subdivide the span
/// of their word; a [UNK] unit spans the whole word.
struct Token {
  std::string text;
  std::size_t begin = 0;
  std::size_t end = 0;

  bool operator==(const Token&) const = default;
};

using TokenList = std::vector<Token>;

/// Subword vocabulary for greedy longest-match-first segmentation
/// (multilingual BERT vocab.txt layout: one unit per line, "##" marks a
/// unit that continues a word).
class SubwordVocab {
 public:
  /// Entry order is preserved; duplicates are dropped with a warning; the
  /// unknown token is appended if missing. Throws ValidationError when no
  /// entries remain.
  SubwordVocab(std::vector<std::string> entries, bool cased = true,
               std::string continuation_prefix = "##",
               std::string unknown_token = "[UNK]",
               Diagnostics* diag = nullptr);

  bool contains(std::string_view unit) const {
    return ids_.find(std::string(unit)) != ids_.end();
  }
  /// Id of a unit, or the unknown token's id.
  std::size_t id(std::string_view unit) const;

  const std::vector<std::string>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool cased() const { return cased_; }
  const std::string& continuation_prefix() const { return prefix_; }
  const std::string& unknown_token() const { return unk_; }
  /// True when the unknown token was absent from the input and synthesized.
  bool unknown_synthesized() const { return unk_synthesized_; }
  std::size_t max_unit_bytes() const { return max_unit_bytes_; }

 private:
  std::vector<std::string> entries_;
  std::unordered_map<std::string, std::size_t> ids_;
  bool cased_;
  std::string prefix_;
  std::string unk_;
  bool unk_synthesized_ = false;
  std::size_t max_unit_bytes_ = 0;
};

/// Reads one unit per line (UTF-8, trailing \r stripped, blank lines
/// skipped). Throws ValidationError on an empty file.
SubwordVocab load_subword_vocab(const std::filesystem::path& path,
                                bool cased = true, Diagnostics* diag = nullptr);

struct WhitespaceMode {};
struct CharacterMode {};
struct SubwordMode {
  std::shared_ptr<const SubwordVocab> vocab;
};
enum class PretokenizedField { kSurface, kLemma };
struct PretokenizedMode {
  PretokenizedField field = PretokenizedField::kSurface;
};

/// Wordhood definition used by every n-gram metric.
struct TokenizerSpec {
  std::variant<WhitespaceMode, CharacterMode, SubwordMode, PretokenizedMode>
      mode;
  bool lowercase = false;
  bool strip_nonword = false;
  bool nfkc = true;

  static TokenizerSpec whitespace() { return {WhitespaceMode{}}; }
  static TokenizerSpec character() { return {CharacterMode{}}; }
  /// Lowercases when the vocabulary is uncased.
  static TokenizerSpec subword(std::shared_ptr<const SubwordVocab> vocab);
  static TokenizerSpec pretokenized(PretokenizedField field) {
    return {PretokenizedMode{field}};
  }

  bool is_pretokenized() const {
    return std::holds_alternative<PretokenizedMode>(mode);
  }
  /// Short id: whitespace, char, subword, pretok:surface, pretok:lemma.
  std::string name() const;
};

/// Tokenizes raw text. Pretokenized specs cannot be applied to raw text
/// and throw ValidationError; use the AnnotatedDocument overload.
TokenList tokenize(std::string_view text, const TokenizerSpec& spec);

/// Tokenizes an annotated document. Pretokenized specs take the chosen
/// field of every token (missing lemma -> ValidationError naming the
/// token); other modes tokenize doc.source_text.
TokenList tokenize(const AnnotatedDocument& doc, const TokenizerSpec& spec);

/// Greedy longest-match-first segmentation of a single word. If any
/// position has no matching unit the whole word becomes [unknown_token].
/// Spans are relative to the word.
TokenList tokenize_subword(std::string_view word, const SubwordVocab& vocab);

/// Just the token strings.
std::vector<std::string> token_texts(const TokenList& tokens);

/// Normalization applied by `spec` before splitting (NFKC, lowercasing).
std::string prepare_text(std::string_view text, const TokenizerSpec& spec);

}  // namespace mlsumeval

#endif  // MLSUMEVAL_TOKENIZE_HPP_
