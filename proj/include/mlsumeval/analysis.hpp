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

#ifndef MLSUMEVAL_ANALYSIS_HPP_
#define MLSUMEVAL_ANALYSIS_HPP_

#include <cstddef>
#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mlsumeval/agreement.hpp"
#include "mlsumeval/corpus.hpp"
#include "mlsumeval/correlation.hpp"
#include "mlsumeval/error.hpp"

namespace mlsumeval {

// ---------------------------------------------------------------------------
// Score files: one JSON object per (item, system, metric).

struct ScoreLine {
  std::string item_id;
  std::string system_id;
  std::string metric;
  double value = 0.0;
};

/// Keyed by (item, system, metric); iteration order is the file order
/// the score command writes.
using ScoreTable =
    std::map<std::tuple<std::string, std::string, std::string>, double>;

std::string serialize_score_line(const ScoreLine& line);
ScoreTable parse_scores(std::istream& in);
ScoreTable load_scores(const std::filesystem::path& path);

/// Metric ids in the table, in first-key order.
std::vector<std::string> score_metrics(const ScoreTable& scores);

/// The (item, system) -> value slice of one metric.
std::map<std::pair<std::string, std::string>, double> metric_slice(
    const ScoreTable& scores, const std::string& metric);

// ---------------------------------------------------------------------------
// Grouped correlation.

enum class GroupBy { kLanguage, kFamily, kResource };

std::string_view to_string(GroupBy g);
std::optional<GroupBy> parse_group_by(std::string_view s);

/// Group label of a record: language code, family name or resource class.
std::string group_label(const CorpusRecord& record, GroupBy by);

/// Labels of every group present in the corpus in report order: families
/// isolating -> high fusional, high resource before low, then code.
std::vector<std::string> group_order(const Corpus& corpus, GroupBy by);

/// Correlates a metric with the mean worker score per (item, system), one
/// report per group. Pairs without a human score are left out; groups with
/// fewer than three pairs or a constant side are skipped with a warning.
/// Throws ValidationError for score items absent from the corpus.
std::vector<CorrelationReport> correlate_grouped(
    const std::map<std::pair<std::string, std::string>, double>& scores,
    const AnnotationSet& annotations, Criterion criterion, const Corpus& corpus,
    GroupBy group_by, CorrelationMethod method, Diagnostics* diag = nullptr);

struct MetricCorrelations {
  std::string metric;
  Criterion criterion = Criterion::kCoherence;
  std::vector<CorrelationReport> reports;
};

/// Rows are metrics, columns criterion x group; cells "r" plus the
/// significance stars, "N.A" where a group was skipped.
std::string render_correlation_table(const std::vector<MetricCorrelations>& rows,
                                     const std::vector<std::string>& groups);

/// One line per report: {metric, criterion, group, method, r, p, n}.
std::string correlation_jsonl(const std::vector<MetricCorrelations>& rows);

// ---------------------------------------------------------------------------
// Annotation statistics.

struct CriterionStats {
  std::optional<double> alpha;  // nullopt when no unit is pairable
  MeanStd score;
  std::optional<MeanStd> gap;   // nullopt when no item has both systems
};

struct LanguageAnnotationStats {
  std::string lang;
  Family family = Family::kIsolating;
  Resource resource = Resource::kLow;
  CriterionStats coherence;
  CriterionStats completeness;
  std::size_t annotations = 0;  // raw records of both criteria
};

struct AnnotationAnalysis {
  std::vector<LanguageAnnotationStats> languages;  // in group_order
  /// Elo per criterion over all languages, and per language.
  std::map<Criterion, EloRatings> elo;
  std::map<std::string, std::map<Criterion, EloRatings>> elo_by_lang;
};

/// Per-language agreement, score and gap statistics plus Elo ratings.
/// Throws ValidationError when the annotations are empty or reference an
/// item missing from the corpus.
AnnotationAnalysis analyze_annotations(const Corpus& corpus,
                                       const AnnotationSet& annotations,
                                       const EloConfig& elo = {},
                                       Diagnostics* diag = nullptr);

/// Columns: Lang., Agreement Coh./Com., Avg. Score (Std) Coh./Com.,
/// Avg. Gap (Std) Coh./Com., # Ann.
std::string render_annotation_table(const AnnotationAnalysis& analysis);
std::string render_elo_table(const AnnotationAnalysis& analysis);
std::string annotation_jsonl(const AnnotationAnalysis& analysis);

}  // namespace mlsumeval

#endif  // MLSUMEVAL_ANALYSIS_HPP_
