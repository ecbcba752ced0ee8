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

// Shared helpers for the test binaries: data paths, scratch directories and
// builders for annotated documents.

#ifndef MLSUMEVAL_TESTS_SUPPORT_FIXTURES_HPP_
#define MLSUMEVAL_TESTS_SUPPORT_FIXTURES_HPP_

#include <atomic>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unistd.h>
#include <vector>

#include "mlsumeval/annotated.hpp"

namespace mlsumeval::testing {

inline std::filesystem::path data_dir() { return MLSUMEVAL_TEST_DATA_DIR; }
inline std::filesystem::path toy_dir() { return data_dir() / "toy"; }
inline std::filesystem::path lexicon_dir() { return MLSUMEVAL_LEXICON_DIR; }
inline std::filesystem::path cli_path() { return MLSUMEVAL_CLI_PATH; }

/// Whitespace split, for building token sequences in assertions.
inline std::vector<std::string> words(const std::string& text) {
  std::istringstream in(text);
  std::vector<std::string> out;
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::filesystem::path& path,
                       const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

/// Scratch directory removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("mlsumeval-test-" + std::to_string(::getpid()) + "-" +
             std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const {
    return path_ / name;
  }

 private:
  std::filesystem::path path_;
};

/// Annotation for one token of a simple_document, in token order.
/// Unset fields keep simple_document's defaults (PUNCT for punctuation).
struct Tag {
  std::optional<std::string> lemma;
  std::optional<std::string> pos;
  std::optional<std::string> ner;
};

/// simple_document over the sentences with tags applied in token order.
/// Throws when the tag count differs from the token count.
inline AnnotatedDocument tagged_document(
    const std::vector<std::string>& sentences, const std::vector<Tag>& tags) {
  AnnotatedDocument doc = simple_document(sentences);
  if (tags.size() != doc.tokens.size()) {
    throw std::invalid_argument("expected " + std::to_string(doc.tokens.size()) +
                                " tags, got " + std::to_string(tags.size()));
  }
  for (std::size_t i = 0; i < tags.size(); ++i) {
    auto& tok = doc.tokens[i];
    if (tags[i].lemma) tok.lemma = tags[i].lemma;
    if (tags[i].pos) tok.pos = tags[i].pos;
    if (tags[i].ner) tok.ner = tags[i].ner;
  }
  return doc;
}

/// Surface forms of a document's tokens.
inline std::vector<std::string> surfaces(const AnnotatedDocument& doc) {
  std::vector<std::string> out;
  for (const auto& t : doc.tokens) out.push_back(t.surface);
  return out;
}

/// Sentence texts of a document.
inline std::vector<std::string> sentence_texts(const AnnotatedDocument& doc) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < doc.sentence_count(); ++i) {
    out.push_back(sentence_text(doc, i));
  }
  return out;
}

}  // namespace mlsumeval::testing

#endif  // MLSUMEVAL_TESTS_SUPPORT_FIXTURES_HPP_
