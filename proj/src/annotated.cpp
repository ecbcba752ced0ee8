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

#include "mlsumeval/annotated.hpp"

#include <algorithm>

#include "jsonl.hpp"
#include "mlsumeval/error.hpp"
#include "mlsumeval/unicode.hpp"

namespace mlsumeval {

using detail::json;

namespace {

// Byte offset of every code point boundary: result[i] is the byte offset of
// code point i, result.back() == text.size().
std::vector<std::size_t> code_point_offsets(std::string_view text) {
  std::vector<std::size_t> offsets;
  offsets.reserve(text.size() + 1);
  for (std::size_t i = 0; i < text.size(); ++i) {
    const auto c = static_cast<unsigned char>(text[i]);
    if ((c & 0xC0) != 0x80) offsets.push_back(i);
  }
  offsets.push_back(text.size());
  return offsets;
}

std::optional<std::string> optional_string(const json& j, const char* key,
                                           std::size_t line) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) {
    throw ValidationError("line " + std::to_string(line) + ": field \"" + key +
                          "\" must be a string or null");
  }
  return it->get<std::string>();
}

}  // namespace

void validate(const AnnotatedDocument& doc) {
  std::size_t prev_end = 0;
  std::size_t prev_sentence = 0;
  for (std::size_t i = 0; i < doc.tokens.size(); ++i) {
    const auto& t = doc.tokens[i];
    const std::string where = "token " + std::to_string(i) + " (\"" +
                              t.surface + "\")";
    if (t.surface.empty()) throw ValidationError(where + ": empty surface");
    if (t.end < t.begin || t.end > doc.source_text.size()) {
      throw ValidationError(where + ": span out of range");
    }
    if (t.begin < prev_end) throw ValidationError(where + ": overlapping span");
    if (doc.source_text.compare(t.begin, t.end - t.begin, t.surface) != 0) {
      throw ValidationError(where + ": span does not reconstruct source text");
    }
    if (t.sentence_id >= doc.sentences.size()) {
      throw ValidationError(where + ": sentence id out of range");
    }
    if (t.sentence_id < prev_sentence) {
      throw ValidationError(where + ": sentence ids not monotone");
    }
    const auto [sb, se] = doc.sentences[t.sentence_id];
    if (t.begin < sb || t.end > se) {
      throw ValidationError(where + ": outside its sentence span");
    }
    prev_end = t.end;
    prev_sentence = t.sentence_id;
  }
}

AnnotatedDocument make_document(std::string text,
                                std::vector<AnnotatedToken> tokens) {
  AnnotatedDocument doc;
  doc.source_text = std::move(text);
  doc.tokens = std::move(tokens);
  std::size_t n_sentences = 0;
  for (const auto& t : doc.tokens) {
    n_sentences = std::max(n_sentences, t.sentence_id + 1);
  }
  doc.sentences.assign(n_sentences, {std::string::npos, 0});
  for (const auto& t : doc.tokens) {
    auto& s = doc.sentences[t.sentence_id];
    s.first = std::min(s.first, t.begin);
    s.second = std::max(s.second, t.end);
  }
  for (std::size_t k = 0; k < n_sentences; ++k) {
    if (doc.sentences[k].first == std::string::npos) {
      throw ValidationError("sentence ids not contiguous: sentence " +
                            std::to_string(k) + " has no tokens");
    }
  }
  validate(doc);
  return doc;
}

AnnotatedDocument simple_document(const std::vector<std::string>& sentences,
                                  std::string_view separator) {
  std::string text;
  std::vector<AnnotatedToken> tokens;
  for (std::size_t k = 0; k < sentences.size(); ++k) {
    if (k > 0) text += separator;
    const std::string& s = sentences[k];
    const std::size_t base = text.size();
    text += s;
    std::size_t i = 0;
    while (i < s.size()) {
      while (i < s.size() && s[i] == ' ') ++i;
      if (i >= s.size()) break;
      std::size_t j = i;
      while (j < s.size() && s[j] != ' ') ++j;
      std::size_t word_end = j;
      while (word_end > i + 1 &&
             std::string_view(".,!?;:").find(s[word_end - 1]) !=
                 std::string_view::npos) {
        --word_end;
      }
      AnnotatedToken w;
      w.surface = s.substr(i, word_end - i);
      w.sentence_id = k;
      w.begin = base + i;
      w.end = base + word_end;
      tokens.push_back(std::move(w));
      for (std::size_t p = word_end; p < j; ++p) {
        AnnotatedToken punct;
        punct.surface = std::string(1, s[p]);
        punct.pos = "PUNCT";
        punct.sentence_id = k;
        punct.begin = base + p;
        punct.end = base + p + 1;
        tokens.push_back(std::move(punct));
      }
      i = j;
    }
  }
  return make_document(std::move(text), std::move(tokens));
}

std::string sentence_text(const AnnotatedDocument& doc, std::size_t i) {
  const auto [b, e] = doc.sentences.at(i);
  return doc.source_text.substr(b, e - b);
}

std::string_view to_string(Side s) {
  switch (s) {
    case Side::kCandidate: return "candidate";
    case Side::kReference: return "reference";
    case Side::kArticle: return "article";
  }
  return "";
}

std::optional<Side> parse_side(std::string_view s) {
  if (s == "candidate") return Side::kCandidate;
  if (s == "reference") return Side::kReference;
  if (s == "article") return Side::kArticle;
  return std::nullopt;
}

void Sidecar::add(Key key, std::vector<SidecarToken> tokens,
                  std::size_t line) {
  auto [it, inserted] = entries_.emplace(std::move(key), std::move(tokens));
  if (!inserted) {
    throw ValidationError(
        (line ? "line " + std::to_string(line) + ": " : std::string()) +
        "duplicate sidecar entry for item " + std::get<0>(it->first) + " (" +
        std::string(to_string(std::get<1>(it->first))) + ")");
  }
}

bool Sidecar::contains(const std::string& item) const {
  auto it = entries_.lower_bound({item, Side::kCandidate, std::string()});
  return it != entries_.end() && std::get<0>(it->first) == item;
}

const std::vector<SidecarToken>* Sidecar::find(const std::string& item,
                                               Side side,
                                               const std::string& system) const {
  if (side == Side::kCandidate && !system.empty()) {
    if (auto it = entries_.find({item, side, system}); it != entries_.end()) {
      return &it->second;
    }
  }
  if (auto it = entries_.find({item, side, std::string()});
      it != entries_.end()) {
    return &it->second;
  }
  return nullptr;
}

AnnotatedDocument Sidecar::bind(const std::string& item, Side side,
                                const std::string& system,
                                const std::string& text) const {
  const auto* tokens = find(item, side, system);
  if (!tokens) {
    throw ValidationError("no sidecar entry for item " + item + " (" +
                          std::string(to_string(side)) +
                          (system.empty() ? "" : ", " + system) + ")");
  }
  const auto offsets = code_point_offsets(text);
  const std::size_t n_cp = offsets.size() - 1;
  std::vector<AnnotatedToken> out;
  out.reserve(tokens->size());
  for (const auto& t : *tokens) {
    if (t.span_end < t.span_begin || t.span_end > n_cp) {
      throw ValidationError("item " + item + ": sidecar span [" +
                            std::to_string(t.span_begin) + "," +
                            std::to_string(t.span_end) +
                            "] outside text of length " + std::to_string(n_cp));
    }
    AnnotatedToken a;
    a.surface = t.surface;
    a.lemma = t.lemma;
    a.pos = t.pos;
    a.ner = t.ner;
    a.sentence_id = t.sentence_id;
    a.begin = offsets[t.span_begin];
    a.end = offsets[t.span_end];
    out.push_back(std::move(a));
  }
  try {
    return make_document(text, std::move(out));
  } catch (const ValidationError& e) {
    throw ValidationError("item " + item + " (" +
                          std::string(to_string(side)) + "): " + e.what());
  }
}

Sidecar parse_sidecar(std::istream& in) {
  Sidecar sidecar;
  detail::for_each_json_line(in, [&](const json& j, std::size_t line) {
    const std::string item = detail::require_string(j, "item_id", line);
    const std::string side_str = detail::require_string(j, "side", line);
    const auto side = parse_side(side_str);
    if (!side) {
      throw ValidationError("line " + std::to_string(line) + ": unknown side \"" +
                            side_str + "\"");
    }
    std::string system;
    if (auto s = optional_string(j, "system", line)) system = *s;
    const json& toks = detail::require(j, "tokens", line);
    if (!toks.is_array()) {
      throw ValidationError("line " + std::to_string(line) +
                            ": \"tokens\" must be an array");
    }
    std::vector<SidecarToken> tokens;
    tokens.reserve(toks.size());
    for (const auto& t : toks) {
      if (!t.is_object()) {
        throw ValidationError("line " + std::to_string(line) +
                              ": token must be an object");
      }
      SidecarToken st;
      st.surface = detail::require_string(t, "surface", line);
      st.lemma = optional_string(t, "lemma", line);
      st.pos = optional_string(t, "pos", line);
      st.ner = optional_string(t, "ner", line);
      const json& sid = detail::require(t, "sentence_id", line);
      const json& span = detail::require(t, "span", line);
      if (!sid.is_number_unsigned() && !(sid.is_number_integer() && sid.get<long long>() >= 0)) {
        throw ValidationError("line " + std::to_string(line) +
                              ": sentence_id must be a nonnegative integer");
      }
      if (!span.is_array() || span.size() != 2 || !span[0].is_number_integer() ||
          !span[1].is_number_integer() || span[0].get<long long>() < 0 ||
          span[1].get<long long>() < 0) {
        throw ValidationError("line " + std::to_string(line) +
                              ": span must be [int, int]");
      }
      st.sentence_id = sid.get<std::size_t>();
      st.span_begin = span[0].get<std::size_t>();
      st.span_end = span[1].get<std::size_t>();
      tokens.push_back(std::move(st));
    }
    sidecar.add({item, *side, system}, std::move(tokens), line);
  });
  return sidecar;
}

Sidecar load_sidecar(const std::filesystem::path& path) {
  auto in = detail::open_input(path);
  return parse_sidecar(in);
}

std::vector<SidecarToken> to_sidecar_tokens(const AnnotatedDocument& doc) {
  const auto offsets = code_point_offsets(doc.source_text);
  auto cp_index = [&](std::size_t byte) {
    return static_cast<std::size_t>(
        std::lower_bound(offsets.begin(), offsets.end(), byte) -
        offsets.begin());
  };
  std::vector<SidecarToken> out;
  out.reserve(doc.tokens.size());
  for (const auto& t : doc.tokens) {
    out.push_back({t.surface, t.lemma, t.pos, t.ner, t.sentence_id,
                   cp_index(t.begin), cp_index(t.end)});
  }
  return out;
}

std::string serialize_sidecar_line(const std::string& item, Side side,
                                   const std::string& system,
                                   const std::vector<SidecarToken>& tokens) {
  auto opt = [](const std::optional<std::string>& s) {
    return s ? nlohmann::ordered_json(*s) : nlohmann::ordered_json(nullptr);
  };
  nlohmann::ordered_json j;
  j["item_id"] = item;
  j["side"] = std::string(to_string(side));
  if (!system.empty()) j["system"] = system;
  j["tokens"] = nlohmann::ordered_json::array();
  for (const auto& t : tokens) {
    nlohmann::ordered_json tj;
    tj["surface"] = t.surface;
    tj["lemma"] = opt(t.lemma);
    tj["pos"] = opt(t.pos);
    tj["ner"] = opt(t.ner);
    tj["sentence_id"] = t.sentence_id;
    tj["span"] = {t.span_begin, t.span_end};
    j["tokens"].push_back(std::move(tj));
  }
  return j.dump();
}

std::string serialize_sidecar_line(const std::string& item, Side side,
                                   const std::string& system,
                                   const AnnotatedDocument& doc) {
  return serialize_sidecar_line(item, side, system, to_sidecar_tokens(doc));
}

}  // namespace mlsumeval
