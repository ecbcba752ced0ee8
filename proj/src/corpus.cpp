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

#include "mlsumeval/corpus.hpp"

#include <set>
#include <sstream>
#include <unordered_map>

#include "jsonl.hpp"
#include "mlsumeval/error.hpp"

namespace mlsumeval {

using detail::json;

namespace {

CorpusRecord record_from_json(const json& j, std::size_t line) {
  CorpusRecord r;
  r.line = line;
  r.id = detail::require_string(j, "id", line);
  if (r.id.empty()) {
    throw ValidationError("line " + std::to_string(line) + ": empty id");
  }
  r.lang = canonical_lang(detail::require_string(j, "lang", line));
  r.article = detail::require_string(j, "article", line);
  r.reference = detail::require_string(j, "reference", line);
  if (detail::trim(r.article).empty() || detail::trim(r.reference).empty()) {
    throw ValidationError("line " + std::to_string(line) + ": record " + r.id +
                          " has an empty article or reference");
  }
  if (auto it = j.find("candidates"); it != j.end() && !it->is_null()) {
    if (!it->is_array()) {
      throw ValidationError("line " + std::to_string(line) +
                            ": \"candidates\" must be an array");
    }
    std::set<std::string> seen;
    for (const auto& c : *it) {
      if (!c.is_object()) {
        throw ValidationError("line " + std::to_string(line) +
                              ": candidate must be an object");
      }
      Candidate cand{detail::require_string(c, "system", line),
                     detail::require_string(c, "text", line)};
      if (!seen.insert(cand.system_id).second) {
        throw ValidationError("line " + std::to_string(line) +
                              ": duplicate candidate system " + cand.system_id);
      }
      r.candidates.push_back(std::move(cand));
    }
  }

  const auto profile = find_language(r.lang);
  if (auto it = j.find("family"); it != j.end() && !it->is_null()) {
    auto f = it->is_string() ? parse_family(it->get<std::string>())
                             : std::nullopt;
    if (!f) {
      throw ValidationError("line " + std::to_string(line) +
                            ": unknown family " + it->dump());
    }
    r.family = *f;
  } else if (profile) {
    r.family = profile->family;
  } else {
    throw ValidationError("line " + std::to_string(line) + ": language " +
                          r.lang + " is not built in; family is required");
  }
  if (auto it = j.find("resource"); it != j.end() && !it->is_null()) {
    auto res = it->is_string() ? parse_resource(it->get<std::string>())
                               : std::nullopt;
    if (!res) {
      throw ValidationError("line " + std::to_string(line) +
                            ": unknown resource " + it->dump());
    }
    r.resource = *res;
  } else if (profile) {
    r.resource = profile->resource;
  } else {
    throw ValidationError("line " + std::to_string(line) + ": language " +
                          r.lang + " is not built in; resource is required");
  }
  return r;
}

}  // namespace

Corpus parse_corpus(std::istream& in) {
  Corpus corpus;
  std::unordered_map<std::string, std::size_t> first_line;
  detail::for_each_json_line(in, [&](const json& j, std::size_t line) {
    CorpusRecord r = record_from_json(j, line);
    auto [it, inserted] = first_line.emplace(r.id, line);
    if (!inserted) {
      throw ValidationError("duplicate id \"" + r.id + "\" on lines " +
                            std::to_string(it->second) + " and " +
                            std::to_string(line));
    }
    corpus.push_back(std::move(r));
  });
  return corpus;
}

Corpus load_corpus(const std::filesystem::path& path) {
  auto in = detail::open_input(path);
  return parse_corpus(in);
}

std::string serialize_record(const CorpusRecord& r) {
  // ordered_json keeps insertion order so output bytes are stable.
  nlohmann::ordered_json j;
  j["id"] = r.id;
  j["lang"] = r.lang;
  j["article"] = r.article;
  j["reference"] = r.reference;
  j["candidates"] = nlohmann::ordered_json::array();
  for (const auto& c : r.candidates) {
    nlohmann::ordered_json cj;
    cj["system"] = c.system_id;
    cj["text"] = c.text;
    j["candidates"].push_back(std::move(cj));
  }
  j["family"] = std::string(to_string(r.family));
  j["resource"] = std::string(to_string(r.resource));
  return j.dump();
}

std::string serialize_corpus(const Corpus& corpus) {
  std::string out;
  for (const auto& r : corpus) {
    out += serialize_record(r);
    out += '\n';
  }
  return out;
}

const CorpusRecord* find_record(const Corpus& corpus, std::string_view id) {
  for (const auto& r : corpus) {
    if (r.id == id) return &r;
  }
  return nullptr;
}

std::string_view to_string(Criterion c) {
  return c == Criterion::kCoherence ? "coherence" : "completeness";
}

std::optional<Criterion> parse_criterion(std::string_view s) {
  if (s == "coherence") return Criterion::kCoherence;
  if (s == "completeness") return Criterion::kCompleteness;
  return std::nullopt;
}

AnnotationSet::AnnotationSet(std::vector<AnnotationRecord> records)
    : records_(std::move(records)) {
  std::map<std::tuple<std::string, std::string, std::string, Criterion>,
           std::size_t>
      seen;
  for (std::size_t i = 0; i < records_.size(); ++i) {
    const auto& r = records_[i];
    if (r.score < 1 || r.score > 4) {
      throw ValidationError("line " + std::to_string(r.line) + ": score " +
                            std::to_string(r.score) + " outside [1,4]");
    }
    auto key = std::make_tuple(r.item_id, r.system_id, r.worker_id, r.criterion);
    auto [it, inserted] = seen.emplace(std::move(key), r.line);
    if (!inserted) {
      throw ValidationError(
          "duplicate annotation (" + r.item_id + ", " + r.system_id + ", " +
          r.worker_id + ", " + std::string(to_string(r.criterion)) +
          ") on lines " + std::to_string(it->second) + " and " +
          std::to_string(r.line));
    }
    index_[{r.item_id, r.system_id, r.criterion}].push_back(i);
  }
}

const std::vector<std::size_t>& AnnotationSet::cell(const std::string& item,
                                                    const std::string& system,
                                                    Criterion criterion) const {
  static const std::vector<std::size_t> kEmpty;
  auto it = index_.find({item, system, criterion});
  return it == index_.end() ? kEmpty : it->second;
}

std::optional<double> AnnotationSet::mean_score(const std::string& item,
                                                const std::string& system,
                                                Criterion criterion) const {
  const auto& idx = cell(item, system, criterion);
  if (idx.empty()) return std::nullopt;
  double sum = 0.0;
  for (auto i : idx) sum += records_[i].score;
  return sum / static_cast<double>(idx.size());
}

std::vector<std::string> AnnotationSet::systems() const {
  std::set<std::string> s;
  for (const auto& r : records_) s.insert(r.system_id);
  return {s.begin(), s.end()};
}

AnnotationSet parse_annotations(std::istream& in) {
  std::vector<AnnotationRecord> records;
  detail::for_each_json_line(in, [&](const json& j, std::size_t line) {
    AnnotationRecord r;
    r.line = line;
    r.item_id = detail::require_string(j, "item_id", line);
    r.system_id = detail::require_string(j, "system_id", line);
    r.worker_id = detail::require_string(j, "worker_id", line);
    const std::string crit = detail::require_string(j, "criterion", line);
    auto c = parse_criterion(crit);
    if (!c) {
      throw ValidationError("line " + std::to_string(line) +
                            ": unknown criterion \"" + crit + "\"");
    }
    r.criterion = *c;
    const json& score = detail::require(j, "score", line);
    if (!score.is_number_integer()) {
      throw ValidationError("line " + std::to_string(line) +
                            ": score must be an integer");
    }
    r.score = score.get<int>();
    records.push_back(std::move(r));
  });
  return AnnotationSet(std::move(records));
}

AnnotationSet load_annotations(const std::filesystem::path& path) {
  auto in = detail::open_input(path);
  return parse_annotations(in);
}

std::string serialize_annotation(const AnnotationRecord& r) {
  nlohmann::ordered_json j;
  j["item_id"] = r.item_id;
  j["system_id"] = r.system_id;
  j["worker_id"] = r.worker_id;
  j["criterion"] = std::string(to_string(r.criterion));
  j["score"] = r.score;
  return j.dump();
}

}  // namespace mlsumeval
