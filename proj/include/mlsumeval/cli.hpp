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

#ifndef MLSUMEVAL_CLI_HPP_
#define MLSUMEVAL_CLI_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mlsumeval/analysis.hpp"
#include "mlsumeval/annotated.hpp"
#include "mlsumeval/corpus.hpp"
#include "mlsumeval/embedding.hpp"
#include "mlsumeval/error.hpp"
#include "mlsumeval/tokenize.hpp"

namespace mlsumeval {

inline constexpr std::string_view kVersion = "0.1.0";

enum class Metric {
  kRouge1, kRouge2, kRouge3, kRougeL, kBleu, kBleuLemma, kChrf,
  kBertScore, kMoverScore
};

std::string_view to_string(Metric m);
std::optional<Metric> parse_metric(std::string_view s);
bool needs_embeddings(Metric m);
bool uses_tokenizer(Metric m);

/// Id written to score files: the metric id, suffixed with "+<tokenizer>"
/// for tokenized metrics under a non-whitespace tokenizer
/// (e.g. "rouge1+subword").
std::string metric_label(Metric m, const TokenizerSpec& spec);

/// Parses whitespace | char | subword:<vocab> | pretok:surface |
/// pretok:lemma. Subword vocabularies are loaded here.
TokenizerSpec parse_tokenizer(std::string_view s, bool lowercase = false,
                              Diagnostics* diag = nullptr);

/// Resolved options of one run. Paths are empty when not given.
struct RunConfig {
  std::string command;
  std::filesystem::path corpus;
  std::filesystem::path annotations;
  std::filesystem::path sidecar;
  std::string embeddings;  // file path or http:// endpoint
  std::filesystem::path scores;
  std::filesystem::path lexicons;
  std::filesystem::path replay;
  std::vector<std::string> metrics;
  std::string tokenizer = "whitespace";
  bool lowercase = false;
  bool idf = false;
  std::optional<std::uint64_t> seed;
  double fraction = 1.0 / 3.0;
  std::string entity_mode = "swap";
  bool verbs_only = false;
  std::string group_by = "lang";
  std::string method = "pearson";
  std::vector<std::string> criteria{"coherence", "completeness"};
  std::size_t elo_shuffle_rounds = 0;
  std::optional<int> layer;
  std::size_t jobs = 1;
  std::filesystem::path out;
};

/// Checks the configuration before any input is read: required inputs per
/// command, known metric/tokenizer/group/method ids and metric-tokenizer
/// compatibility. Throws ValidationError.
void validate_config(const RunConfig& config);

/// Config echo with every resolved option.
std::string config_json(const RunConfig& config);

/// Files a command produces, written only after the command succeeds.
struct CommandOutput {
  std::vector<std::pair<std::filesystem::path, std::string>> files;
  Diagnostics diagnostics;
};

/// Scores every (record, candidate, metric) and returns the table keyed by
/// (item, system, metric label). Records are scored in parallel when
/// jobs > 1; the result does not depend on it.
ScoreTable score_corpus(const Corpus& corpus, const std::vector<Metric>& metrics,
                        const TokenizerSpec& spec, const Sidecar* sidecar,
                        const EmbeddingStore* embeddings, bool idf,
                        std::size_t jobs, Diagnostics* diag = nullptr);

/// Embeds every candidate and reference text of the corpus through the
/// HTTP endpoint.
EmbeddingStore embed_corpus_remote(const Corpus& corpus,
                                   const std::string& endpoint,
                                   std::optional<int> layer, std::size_t jobs);

std::string render_scores(const ScoreTable& scores);

CommandOutput cmd_score(const RunConfig& config);
CommandOutput cmd_corrupt(const RunConfig& config);
CommandOutput cmd_stats(const RunConfig& config);
CommandOutput cmd_analyze(const RunConfig& config);
CommandOutput cmd_correlate(const RunConfig& config);

/// Validates, dispatches on config.command and appends the config echo.
CommandOutput run_command(const RunConfig& config);

/// Writes every file to a temporary sibling, then renames them into place.
/// On failure no output file is left behind.
void write_outputs(const CommandOutput& output);

}  // namespace mlsumeval

#endif  // MLSUMEVAL_CLI_HPP_
