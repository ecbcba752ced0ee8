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

#ifndef MLSUMEVAL_CORRUPTION_HPP_
#define MLSUMEVAL_CORRUPTION_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mlsumeval/annotated.hpp"
#include "mlsumeval/corpus.hpp"
#include "mlsumeval/error.hpp"
#include "mlsumeval/rng.hpp"

namespace mlsumeval {

/// Rule ids recorded in corruption plans.
namespace rule {
inline constexpr std::string_view kLemma = "coherence.lemma";
inline constexpr std::string_view kFallback = "coherence.fallback";
inline constexpr std::string_view kReorder = "coherence.reorder";
inline constexpr std::string_view kReorderAdjacent = "coherence.reorder_adjacent";
inline constexpr std::string_view kEntitySwap = "completeness.entity_swap";
inline constexpr std::string_view kEntityReplace = "completeness.entity_replace";
inline constexpr std::string_view kInsert = "completeness.insert";
}  // namespace rule

/// Result of one rule: the new document plus notes on degraded behaviour
/// (adjacent swap, emptied sentence, skipped sentence).
struct RuleOutput {
  AnnotatedDocument doc;
  std::vector<std::string> flags;
};

/// Replaces the surface of every NOUN and VERB token (VERB only when
/// verbs_only) with its lemma. Token count is preserved. Throws
/// ValidationError naming the token when a target lacks a lemma.
AnnotatedDocument corrupt_coherence_lemma(const AnnotatedDocument& doc,
                                          bool verbs_only = false);

/// Conjunction part of the fallback rule: every CONJ/CCONJ token is
/// replaced by a different lexicon entry; a sentence without one gets an
/// entry inserted between two non-punctuation tokens at a seeded position.
/// An empty lexicon leaves the document unchanged.
RuleOutput replace_conjunctions(const AnnotatedDocument& doc,
                                std::span<const std::string> lexicon, Rng& rng);

/// Word-removal part of the fallback rule: one seeded non-entity token per
/// sentence is removed, preferring non-punctuation, non-conjunction
/// tokens. A sentence left without tokens is dropped and flagged.
RuleOutput remove_random_words(const AnnotatedDocument& doc, Rng& rng);

/// Conjunction replacement followed by word removal. Throws
/// ValidationError when the lexicon is empty and no token is removable.
RuleOutput corrupt_coherence_fallback(const AnnotatedDocument& doc,
                                      std::span<const std::string> lexicon,
                                      std::uint64_t seed);

/// Swaps one seeded pair of sentences at distance >= 2; with exactly two
/// sentences they are swapped and the result flagged "adjacent-swap".
/// Throws NotApplicable for fewer than two sentences.
RuleOutput corrupt_coherence_reorder(const AnnotatedDocument& doc,
                                     std::uint64_t seed);

enum class EntityMode { kSwapWithinSummary, kReplaceFromArticle };

std::string_view to_string(EntityMode m);
std::optional<EntityMode> parse_entity_mode(std::string_view s);

/// A maximal run of same-label entity tokens within one sentence
/// (B-/I- prefixes are honoured: B- always starts a new entity).
struct EntitySpan {
  std::string label;
  std::size_t first = 0;  // token index
  std::size_t last = 0;   // one past the final token
  std::string text;       // surface text including inner whitespace
};

std::vector<EntitySpan> find_entities(const AnnotatedDocument& doc);

/// SwapWithinSummary permutes entities among positions of the same label
/// (each label with at least two distinct texts; a permutation that
/// changes nothing becomes a cyclic shift). ReplaceFromArticle replaces one
/// seeded summary entity by a different same-label entity of the article.
/// Throws NotApplicable when the preconditions are not met.
AnnotatedDocument corrupt_completeness_entity(const AnnotatedDocument& doc,
                                              EntityMode mode,
                                              const AnnotatedDocument* article,
                                              std::uint64_t seed);

/// Inserts one sentence of a seeded donor document at a seeded sentence
/// boundary (0 .. sentence_count). Throws ValidationError when no donor
/// has a sentence.
AnnotatedDocument corrupt_completeness_insert(
    const AnnotatedDocument& doc, std::span<const AnnotatedDocument> donor_pool,
    std::uint64_t seed);

/// Inserts sentence `sentence` of `donor` before sentence `boundary`.
AnnotatedDocument insert_sentence(const AnnotatedDocument& doc,
                                  const AnnotatedDocument& donor,
                                  std::size_t sentence, std::size_t boundary);

/// Conjunction lexicons by language code.
using ConjunctionLexicons = std::map<std::string, std::vector<std::string>>;

/// Reads <dir>/<lang>.txt files: one entry per line, '#' comments and
/// blank lines skipped.
ConjunctionLexicons load_conjunction_lexicons(const std::filesystem::path& dir);

struct CorruptionOptions {
  double fraction = 1.0 / 3.0;
  std::uint64_t seed = 0;
  EntityMode entity_mode = EntityMode::kSwapWithinSummary;
  bool verbs_only = false;
  ConjunctionLexicons lexicons;
  std::size_t jobs = 1;
};

struct CandidateCorruption {
  std::string system_id;
  std::vector<std::string> rules;
  std::vector<std::string> flags;
  std::string original;
  std::string corrupted;
  AnnotatedDocument doc;  // corrupted annotation, not serialized in plans
};

struct CorruptionPlan {
  std::string item_id;
  Criterion criterion = Criterion::kCoherence;
  std::vector<std::string> rules_applied;  // union over candidates, sorted
  std::uint64_t seed = 0;                  // record substream seed
  std::vector<CandidateCorruption> candidates;
};

/// A document whose sentences may be inserted into other records.
struct DonorDocument {
  std::string lang;
  AnnotatedDocument doc;
};

struct CorruptionResult {
  Corpus corpus;
  std::vector<CorruptionPlan> plans;  // in corpus order
};

/// Number of records corrupted: floor(fraction * n). Throws DomainError
/// unless 0 < fraction <= 1.
std::size_t corruption_count(double fraction, std::size_t n);

/// Ids of the records selected for corruption: the corruption_count
/// records with the smallest seeded hash of their id.
std::vector<std::string> select_records(const Corpus& corpus, double fraction,
                                        std::uint64_t seed);

/// Corrupts one record's candidates under a criterion with the given record
/// seed. Inserted sentences come from other records of the same language,
/// or of any language when the record's language has no other donor. If the criterion's rules cannot change a candidate the other
/// criterion is used for the whole record (recorded in diag). Throws
/// ValidationError naming the record when a sidecar entry is missing or
/// no rule changes the text.
CorruptionPlan corrupt_record(const CorpusRecord& record, const Sidecar& sidecar,
                              Criterion criterion, std::uint64_t record_seed,
                              const CorruptionOptions& options,
                              const std::map<std::string, DonorDocument>& donors,
                              Diagnostics* diag = nullptr);

/// Donor documents (article side, else reference side) keyed by item id.
std::map<std::string, DonorDocument> donor_documents(const Corpus& corpus,
                                                     const Sidecar& sidecar);

/// Selects records, draws a criterion per record and corrupts each
/// selected record's candidates in place. Deterministic in (corpus,
/// sidecar, options); records run in parallel when options.jobs > 1.
CorruptionResult corrupt_corpus(const Corpus& corpus, const Sidecar& sidecar,
                                const CorruptionOptions& options,
                                Diagnostics* diag = nullptr);

/// Re-applies logged plans (criterion and seed) to the original corpus.
CorruptionResult replay_plans(const Corpus& corpus, const Sidecar& sidecar,
                              const std::vector<CorruptionPlan>& plans,
                              const CorruptionOptions& options,
                              Diagnostics* diag = nullptr);

std::string serialize_plan(const CorruptionPlan& plan);
std::vector<CorruptionPlan> parse_plans(std::istream& in);

/// Sidecar lines for the corrupted corpus: every input entry, with the
/// corrupted candidates' annotations substituted.
std::string corrupted_sidecar(const Sidecar& sidecar,
                              const std::vector<CorruptionPlan>& plans);

}  // namespace mlsumeval

#endif  // MLSUMEVAL_CORRUPTION_HPP_
