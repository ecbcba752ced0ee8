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

#ifndef MLSUMEVAL_ANNOTATED_HPP_
#define MLSUMEVAL_ANNOTATED_HPP_

#include <cstddef>
#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

namespace mlsumeval {

/// One token of a linguistically annotated text. begin/end are UTF-8 byte
/// offsets into the owning document's source_text.
struct AnnotatedToken {
  std::string surface;
  std::optional<std::string> lemma;
  std::optional<std::string> pos;
  std::optional<std::string> ner;
  std::size_t sentence_id = 0;
  std::size_t begin = 0;
  std::size_t end = 0;

  bool operator==(const AnnotatedToken&) const = default;
};

/// Token stream with lemma/POS/NER/sentence annotations over a source text.
///
/// Invariants (checked by validate()): sentence ids are contiguous from 0
/// and nondecreasing along the stream; every token lies inside the span of
/// its sentence; source_text.substr(begin, end - begin) == surface.
struct AnnotatedDocument {
  std::vector<AnnotatedToken> tokens;
  std::vector<std::pair<std::size_t, std::size_t>> sentences;
  std::string source_text;

  std::size_t sentence_count() const { return sentences.size(); }
  bool operator==(const AnnotatedDocument&) const = default;
};

/// Throws ValidationError naming the first violated invariant.
void validate(const AnnotatedDocument& doc);

/// Builds a document from tokens over a known text. Token spans are taken
/// as given (byte offsets) and sentence spans derived from them.
AnnotatedDocument make_document(std::string text,
                                std::vector<AnnotatedToken> tokens);

/// Plain-text sentences, one per element, joined with `separator`. Tokens
/// are whitespace-separated words with trailing ASCII punctuation split off
/// ("needed." -> "needed", "."). No annotations are attached. Used to build
/// fixtures and donor sentences.
AnnotatedDocument simple_document(const std::vector<std::string>& sentences,
                                  std::string_view separator = " ");

/// Text of sentence i (its span of source_text).
std::string sentence_text(const AnnotatedDocument& doc, std::size_t i);

enum class Side { kCandidate, kReference, kArticle };

std::string_view to_string(Side s);
std::optional<Side> parse_side(std::string_view s);

/// Sidecar token as written on disk: span in Unicode code points.
struct SidecarToken {
  std::string surface;
  std::optional<std::string> lemma;
  std::optional<std::string> pos;
  std::optional<std::string> ner;
  std::size_t sentence_id = 0;
  std::size_t span_begin = 0;
  std::size_t span_end = 0;
};

/// Annotation sidecar keyed by (item_id, side, system). system is empty
/// for reference/article lines and for candidate lines that omit it.
class Sidecar {
 public:
  using Key = std::tuple<std::string, Side, std::string>;

  void add(Key key, std::vector<SidecarToken> tokens, std::size_t line = 0);
  bool contains(const std::string& item) const;

  /// Finds the tokens for a side. For candidates, an entry without a system
  /// matches any system.
  const std::vector<SidecarToken>* find(const std::string& item, Side side,
                                        const std::string& system = {}) const;

  /// Binds sidecar tokens to the text they annotate. Throws
  /// ValidationError (with the item id) when spans do not reconstruct the
  /// text or sentence ids are not contiguous.
  AnnotatedDocument bind(const std::string& item, Side side,
                         const std::string& system,
                         const std::string& text) const;

  const std::map<Key, std::vector<SidecarToken>>& entries() const {
    return entries_;
  }

 private:
  std::map<Key, std::vector<SidecarToken>> entries_;
};

Sidecar parse_sidecar(std::istream& in);
Sidecar load_sidecar(const std::filesystem::path& path);

/// One sidecar JSON line for a document (spans converted to code points).
std::string serialize_sidecar_line(const std::string& item, Side side,
                                   const std::string& system,
                                   const AnnotatedDocument& doc);
std::string serialize_sidecar_line(const std::string& item, Side side,
                                   const std::string& system,
                                   const std::vector<SidecarToken>& tokens);

/// Converts a document's byte spans into sidecar tokens.
std::vector<SidecarToken> to_sidecar_tokens(const AnnotatedDocument& doc);

}  // namespace mlsumeval

#endif  // MLSUMEVAL_ANNOTATED_HPP_
