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

#ifndef MLSUMEVAL_UNICODE_HPP_
#define MLSUMEVAL_UNICODE_HPP_

#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace mlsumeval::unicode {

/// Byte range [begin, end) into a UTF-8 string.
using Span = std::pair<std::size_t, std::size_t>;

/// NFKC normalization. Invalid UTF-8 sequences are replaced by U+FFFD.
std::string nfkc(std::string_view utf8);

/// Full Unicode lowercase mapping (root locale).
std::string to_lower(std::string_view utf8);

/// Extended grapheme cluster boundaries.
std::vector<Span> grapheme_clusters(std::string_view utf8);

struct CodePoint {
  char32_t value;
  std::size_t begin;  // byte offsets of the encoded sequence
  std::size_t end;
};

/// Decoded code points with their byte spans; each invalid sequence decodes
/// to U+FFFD.
std::vector<CodePoint> decode(std::string_view utf8);
std::vector<char32_t> code_points(std::string_view utf8);

void append_utf8(std::string& out, char32_t cp);

bool is_whitespace(char32_t cp);
/// Letter, mark or number.
bool is_word_char(char32_t cp);
/// Unicode punctuation or ASCII symbol, as split off by BERT-style
/// basic tokenizers.
bool is_punctuation(char32_t cp);
/// CJK unified ideographs (and extensions), split per character by
/// BERT-style basic tokenizers.
bool is_cjk_ideograph(char32_t cp);

/// True when every code point of the string is whitespace.
bool all_whitespace(std::string_view utf8);

}  // namespace mlsumeval::unicode

#endif  // MLSUMEVAL_UNICODE_HPP_
