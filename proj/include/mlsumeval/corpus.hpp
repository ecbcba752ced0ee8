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

#ifndef MLSUMEVAL_CORPUS_HPP_
#define MLSUMEVAL_CORPUS_HPP_

#include <cstddef>
#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "mlsumeval/language.hpp"

namespace mlsumeval {

struct Candidate {
  std::string system_id;
  std::string text;
};

/// One article with its reference summary and candidate summaries.
struct CorpusRecord {
  std::string id;
  std::string lang;
  std::string article;
  std::string reference;
  std::vector<Candidate> candidates;
  Family family = Family::kIsolating;
  Resource resource = Resource::kLow;
  std::size_t line = 0;  // 1-based source line, 0 when built in memory
};

using Corpus = std::vector<CorpusRecord>;

/// Parses line-delimited JSON records. Blank lines are skipped. Throws
/// ParseError (with line number) for malformed lines and ValidationError for
/// invariant violations; duplicate ids name both lines.
Corpus parse_corpus(std::istream& in);
Corpus load_corpus(const std::filesystem::path& path);

/// One JSON object per line, fields in a fixed order.
std::string serialize_record(const CorpusRecord& record);
std::string serialize_corpus(const Corpus& corpus);

const CorpusRecord* find_record(const Corpus& corpus, std::string_view id);

enum class Criterion { kCoherence, kCompleteness };

std::string_view to_string(Criterion c);
std::optional<Criterion> parse_criterion(std::string_view s);

struct AnnotationRecord {
  std::string item_id;
  std::string system_id;
  std::string worker_id;
  Criterion criterion = Criterion::kCoherence;
  int score = 0;  // Likert 1..4
  std::size_t line = 0;
};

/// Annotation records in file order, indexed by (item, system, criterion).
class AnnotationSet {
 public:
  using Key = std::tuple<std::string, std::string, Criterion>;

  AnnotationSet() = default;
  /// Validates every record and the uniqueness of
  /// (item, system, worker, criterion).
  explicit AnnotationSet(std::vector<AnnotationRecord> records);

  const std::vector<AnnotationRecord>& records() const { return records_; }
  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }

  /// Indices into records() for one (item, system, criterion) cell.
  const std::vector<std::size_t>& cell(const std::string& item,
                                       const std::string& system,
                                       Criterion criterion) const;

  /// Mean worker score of a cell; nullopt when the cell is empty.
  std::optional<double> mean_score(const std::string& item,
                                   const std::string& system,
                                   Criterion criterion) const;

  const std::map<Key, std::vector<std::size_t>>& index() const {
    return index_;
  }

  /// Distinct system ids, sorted.
  std::vector<std::string> systems() const;

  /// Restriction to records whose item id satisfies the predicate.
  template <typename Pred>
  AnnotationSet filter_items(Pred&& keep) const {
    std::vector<AnnotationRecord> out;
    for (const auto& r : records_) {
      if (keep(r.item_id)) out.push_back(r);
    }
    return AnnotationSet(std::move(out));
  }

 private:
  std::vector<AnnotationRecord> records_;
  std::map<Key, std::vector<std::size_t>> index_;
};

AnnotationSet parse_annotations(std::istream& in);
AnnotationSet load_annotations(const std::filesystem::path& path);
std::string serialize_annotation(const AnnotationRecord& record);

}  // namespace mlsumeval

#endif  // MLSUMEVAL_CORPUS_HPP_
