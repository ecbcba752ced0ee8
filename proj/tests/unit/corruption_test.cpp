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

#include <algorithm>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "mlsumeval/annotated.hpp"
#include "mlsumeval/corruption.hpp"
#include "mlsumeval/error.hpp"
#include "mlsumeval/rng.hpp"
#include "support/fixtures.hpp"
#include "support/synthetic.hpp"

namespace mlsumeval {
namespace {

using testing::sentence_texts;
using testing::surfaces;
using testing::Tag;
using testing::tagged_document;

Tag t(std::string lemma, std::string pos, std::string ner = "O") {
  return {lemma, pos, ner};
}
const Tag kPunct{std::nullopt, "PUNCT", "O"};

std::multiset<std::string> sentence_multiset(const AnnotatedDocument& doc) {
  const auto s = sentence_texts(doc);
  return {s.begin(), s.end()};
}

std::map<std::string, std::multiset<std::string>> entity_multiset(
    const AnnotatedDocument& doc) {
  std::map<std::string, std::multiset<std::string>> out;
  for (const auto& e : find_entities(doc)) out[e.label].insert(e.text);
  return out;
}

std::vector<std::string> en_lexicon() {
  return load_conjunction_lexicons(testing::lexicon_dir()).at("en");
}

// Worked examples: each clean sentence with the annotations a tagger would
// supply and the corrupted text the rule produces.

TEST(WorkedExample, Lemma) {
  // The auxiliary is tagged VERB, as in the example's tagging.
  const auto doc = tagged_document(
      {"The athletes are preparing for the championship."},
      {t("the", "DET"), t("athlete", "NOUN"), t("be", "VERB"),
       t("prepare", "VERB"), t("for", "ADP"), t("the", "DET"),
       t("championship", "NOUN"), kPunct});
  const auto out = corrupt_coherence_lemma(doc);
  EXPECT_EQ(out.source_text, "The athlete be prepare for the championship.");
  EXPECT_EQ(out.tokens.size(), doc.tokens.size());
  validate(out);
}

TEST(WorkedExample, Conjunction) {
  const auto doc = simple_document({"Policies address rising inflation."});
  const auto lex = en_lexicon();
  Rng rng(40);
  const auto out = replace_conjunctions(doc, lex, rng);
  EXPECT_EQ(out.doc.source_text, "Policies however address rising inflation.");
  validate(out.doc);
}

TEST(WorkedExample, Reorder) {
  const auto doc = simple_document(
      {"The center is hosting a charity event.", "Volunteers are needed."});
  for (std::uint64_t seed : {0u, 1u, 99u}) {
    const auto out = corrupt_coherence_reorder(doc, seed);
    EXPECT_EQ(out.doc.source_text,
              "Volunteers are needed. The center is hosting a charity event.");
    EXPECT_EQ(out.flags,
              (std::vector<std::string>{"adjacent-swap", "swapped:0,1"}));
  }
}

TEST(WorkedExample, EntitySwap) {
  const auto doc = tagged_document(
      {"Joe Biden met Britney Spears at a charity event."},
      {t("Joe", "PROPN", "B-PER"), t("Biden", "PROPN", "I-PER"),
       t("meet", "VERB"), t("Britney", "PROPN", "B-PER"),
       t("Spears", "PROPN", "I-PER"), t("at", "ADP"), t("a", "DET"),
       t("charity", "NOUN"), t("event", "NOUN"), kPunct});
  for (std::uint64_t seed : {0u, 5u, 17u}) {
    const auto out = corrupt_completeness_entity(
        doc, EntityMode::kSwapWithinSummary, nullptr, seed);
    EXPECT_EQ(out.source_text,
              "Britney Spears met Joe Biden at a charity event.");
    validate(out);
  }
}

TEST(WorkedExample, Insert) {
  const auto doc =
      simple_document({"Scientists found a new fish species in the Amazon."});
  const std::vector<AnnotatedDocument> pool{
      simple_document({"A bakery is giving free cake samples."})};
  const auto out = corrupt_completeness_insert(doc, pool, 6);
  EXPECT_EQ(out.source_text,
            "Scientists found a new fish species in the Amazon. A bakery is "
            "giving free cake samples.");
  EXPECT_EQ(out, insert_sentence(doc, pool[0], 0, 1));
}

TEST(Lemma, VerbsOnlyAndErrors) {
  const auto doc = tagged_document(
      {"Dogs ran home."},
      {t("dog", "NOUN"), t("run", "VERB"), t("home", "ADV"), kPunct});
  EXPECT_EQ(corrupt_coherence_lemma(doc).source_text, "dog run home.");
  EXPECT_EQ(corrupt_coherence_lemma(doc, true).source_text, "Dogs run home.");
  auto missing = doc;
  missing.tokens[1].lemma.reset();
  try {
    corrupt_coherence_lemma(missing);
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("ran"), std::string::npos);
  }
  // Nothing to change: no nouns or verbs, or already in lemma form.
  const auto plain = tagged_document({"Very good."},
                                     {t("very", "ADV"), t("good", "ADJ"), kPunct});
  EXPECT_EQ(corrupt_coherence_lemma(plain), plain);
  const auto lemmas = corrupt_coherence_lemma(doc);
  EXPECT_EQ(corrupt_coherence_lemma(lemmas).source_text, lemmas.source_text);
}

TEST(Fallback, ReplacesEveryConjunction) {
  const auto doc = tagged_document(
      {"Rain fell and winds rose but schools opened."},
      {t("rain", "NOUN"), t("fall", "VERB"), t("and", "CCONJ"),
       t("wind", "NOUN"), t("rise", "VERB"), t("but", "CCONJ"),
       t("school", "NOUN"), t("open", "VERB"), kPunct});
  const auto lex = en_lexicon();
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    Rng rng(seed);
    const auto out = replace_conjunctions(doc, lex, rng);
    ASSERT_EQ(out.doc.tokens.size(), doc.tokens.size());
    EXPECT_NE(out.doc.tokens[2].surface, "and");
    EXPECT_NE(out.doc.tokens[5].surface, "but");
    for (std::size_t i : {2u, 5u}) {
      EXPECT_NE(std::find(lex.begin(), lex.end(), out.doc.tokens[i].surface),
                lex.end());
    }
  }
}

TEST(Fallback, RemovesOneNonEntityTokenPerSentence) {
  const auto doc = tagged_document(
      {"Anna visited Paris today.", "Officials announced rules."},
      {t("Anna", "PROPN", "B-PER"), t("visit", "VERB"),
       t("Paris", "PROPN", "B-LOC"), t("today", "NOUN"), kPunct,
       t("official", "NOUN"), t("announce", "VERB"), t("rule", "NOUN"), kPunct});
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    Rng rng(seed);
    const auto out = remove_random_words(doc, rng);
    validate(out.doc);
    ASSERT_EQ(out.doc.sentence_count(), 2u);
    EXPECT_EQ(out.doc.tokens.size(), doc.tokens.size() - 2);
    EXPECT_EQ(entity_multiset(out.doc), entity_multiset(doc));
    for (const auto& s : sentence_texts(out.doc)) EXPECT_EQ(s.back(), '.');
  }
}

TEST(Fallback, SingleTokenSentenceIsDropped) {
  const auto doc = simple_document({"Hello", "Bye now."});
  Rng rng(3);
  const auto out = remove_random_words(doc, rng);
  EXPECT_EQ(out.doc.sentence_count(), 1u);
  EXPECT_NE(std::find(out.flags.begin(), out.flags.end(), "empty-sentence:0"),
            out.flags.end());
  validate(out.doc);
}

TEST(Fallback, DeterministicAndErrors) {
  const auto doc = simple_document({"Policies address rising inflation.",
                                    "Markets react."});
  const auto lex = en_lexicon();
  EXPECT_EQ(corrupt_coherence_fallback(doc, lex, 11).doc,
            corrupt_coherence_fallback(doc, lex, 11).doc);
  EXPECT_NE(corrupt_coherence_fallback(doc, lex, 11).doc.source_text,
            doc.source_text);
  EXPECT_THROW(corrupt_coherence_fallback(simple_document({}), lex, 1),
               ValidationError);
  const auto only_entities = tagged_document(
      {"Paris."}, {t("Paris", "PROPN", "B-LOC"), kPunct});
  // Punctuation is removable; an empty lexicon still succeeds.
  EXPECT_NO_THROW(corrupt_coherence_fallback(only_entities, {}, 1));
  const auto bare = tagged_document({"Paris"}, {t("Paris", "PROPN", "B-LOC")});
  EXPECT_THROW(corrupt_coherence_fallback(bare, {}, 1), ValidationError);
}

TEST(Reorder, NonAdjacentPairs) {
  const auto doc = simple_document({"S zero.", "S one.", "S two.", "S three."});
  std::set<std::string> seen;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto out = corrupt_coherence_reorder(doc, seed);
    EXPECT_EQ(sentence_multiset(out.doc), sentence_multiset(doc));
    ASSERT_EQ(out.flags.size(), 1u);
    seen.insert(out.flags[0]);
    const auto moved = sentence_texts(out.doc);
    std::vector<std::size_t> diff;
    for (std::size_t i = 0; i < moved.size(); ++i) {
      if (moved[i] != sentence_texts(doc)[i]) diff.push_back(i);
    }
    ASSERT_EQ(diff.size(), 2u);
    EXPECT_GE(diff[1] - diff[0], 2u);
  }
  EXPECT_EQ(seen, (std::set<std::string>{"swapped:0,2", "swapped:0,3",
                                         "swapped:1,3"}));
  EXPECT_THROW(corrupt_coherence_reorder(simple_document({"One."}), 1),
               NotApplicable);
}

TEST(Entity, FindEntities) {
  const auto doc = tagged_document(
      {"Anna Lopez met Maria in Paris."},
      {t("Anna", "PROPN", "B-PER"), t("Lopez", "PROPN", "I-PER"),
       t("meet", "VERB"), t("Maria", "PROPN", "B-PER"), t("in", "ADP"),
       t("Paris", "PROPN", "LOC"), kPunct});
  const auto ents = find_entities(doc);
  ASSERT_EQ(ents.size(), 3u);
  EXPECT_EQ(ents[0].text, "Anna Lopez");
  EXPECT_EQ(ents[0].label, "PER");
  EXPECT_EQ(ents[1].text, "Maria");
  EXPECT_EQ(ents[2].label, "LOC");
  // Adjacent B- tags start separate entities.
  const auto adj = tagged_document(
      {"Anna Maria"}, {t("Anna", "PROPN", "B-PER"), t("Maria", "PROPN", "B-PER")});
  EXPECT_EQ(find_entities(adj).size(), 2u);
}

TEST(Entity, NotApplicableAndReplace) {
  const auto one = tagged_document(
      {"Anna left."}, {t("Anna", "PROPN", "B-PER"), t("leave", "VERB"), kPunct});
  EXPECT_THROW(
      corrupt_completeness_entity(one, EntityMode::kSwapWithinSummary, nullptr, 1),
      NotApplicable);
  EXPECT_THROW(corrupt_completeness_entity(one, EntityMode::kReplaceFromArticle,
                                           nullptr, 1),
               NotApplicable);
  const auto article = tagged_document(
      {"Anna and David Kim left early."},
      {t("Anna", "PROPN", "B-PER"), t("and", "CCONJ"), t("David", "PROPN", "B-PER"),
       t("Kim", "PROPN", "I-PER"), t("leave", "VERB"), t("early", "ADV"), kPunct});
  const auto out = corrupt_completeness_entity(one, EntityMode::kReplaceFromArticle,
                                               &article, 1);
  EXPECT_EQ(out.source_text, "David Kim left.");
  validate(out);
  const auto same = tagged_document(
      {"Anna saw Anna."}, {t("Anna", "PROPN", "B-PER"), t("see", "VERB"),
                           t("Anna", "PROPN", "B-PER"), kPunct});
  EXPECT_THROW(
      corrupt_completeness_entity(same, EntityMode::kSwapWithinSummary, nullptr, 1),
      NotApplicable);
  EXPECT_EQ(parse_entity_mode("replace"), EntityMode::kReplaceFromArticle);
  EXPECT_FALSE(parse_entity_mode("shuffle"));
}

TEST(Insert, Properties) {
  const auto doc = simple_document({"One here.", "Two here.", "Three here."});
  const std::vector<AnnotatedDocument> pool{
      simple_document({"Donor a.", "Donor b."}), simple_document({}),
      simple_document({"Donor c."})};
  std::set<std::string> donors;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto out = corrupt_completeness_insert(doc, pool, seed);
    validate(out);
    ASSERT_EQ(out.sentence_count(), doc.sentence_count() + 1);
    auto kept = sentence_texts(out);
    std::string inserted;
    for (auto it = kept.begin(); it != kept.end(); ++it) {
      if (it->rfind("Donor", 0) == 0) {
        inserted = *it;
        kept.erase(it);
        break;
      }
    }
    EXPECT_EQ(kept, sentence_texts(doc));
    donors.insert(inserted);
    EXPECT_EQ(out, corrupt_completeness_insert(doc, pool, seed));
  }
  EXPECT_EQ(donors, (std::set<std::string>{"Donor a.", "Donor b.", "Donor c."}));
  EXPECT_THROW(corrupt_completeness_insert(doc, {}, 1), ValidationError);
  EXPECT_THROW(insert_sentence(doc, pool[0], 2, 0), ValidationError);
  EXPECT_THROW(insert_sentence(doc, pool[0], 0, 4), ValidationError);
}

TEST(Lexicons, Load) {
  const auto lex = load_conjunction_lexicons(testing::lexicon_dir());
  ASSERT_TRUE(lex.count("en"));
  const auto& en = lex.at("en");
  EXPECT_EQ(en.front(), "and");
  EXPECT_NE(std::find(en.begin(), en.end(), "however"), en.end());
  for (const auto& w : en) EXPECT_NE(w.front(), '#');
  testing::TempDir dir;
  testing::write_file(dir / "xx.txt", "# comment\n\nfoo\nfoo\n bar \n");
  testing::write_file(dir / "notes.md", "ignored");
  const auto custom = load_conjunction_lexicons(dir.path());
  EXPECT_EQ(custom.size(), 1u);
  EXPECT_EQ(custom.begin()->second, (std::vector<std::string>{"foo", "bar"}));
  EXPECT_THROW(load_conjunction_lexicons(dir / "missing"), IoError);
}

TEST(Corpus, CountAndSelection) {
  EXPECT_EQ(corruption_count(1.0 / 3.0, 9), 3u);
  EXPECT_EQ(corruption_count(1.0 / 3.0, 30), 10u);
  EXPECT_EQ(corruption_count(1.0, 7), 7u);
  EXPECT_EQ(corruption_count(0.5, 1), 0u);
  EXPECT_THROW(corruption_count(0.0, 9), DomainError);
  EXPECT_THROW(corruption_count(1.5, 9), DomainError);
  const auto syn = testing::synthetic_corpus(9, 1);
  const auto a = select_records(syn.corpus, 1.0 / 3.0, 5);
  EXPECT_EQ(a.size(), 3u);
  EXPECT_EQ(a, select_records(syn.corpus, 1.0 / 3.0, 5));
  EXPECT_EQ(std::set<std::string>(a.begin(), a.end()).size(), 3u);
}

TEST(Corpus, CorruptsSelectedRecords) {
  const auto syn = testing::synthetic_corpus(30, 2);
  CorruptionOptions options;
  options.seed = 7;
  options.lexicons = load_conjunction_lexicons(testing::lexicon_dir());
  Diagnostics diag;
  const auto result = corrupt_corpus(syn.corpus, syn.sidecar, options, &diag);
  ASSERT_EQ(result.plans.size(), 10u);
  std::set<std::string> planned;
  for (const auto& p : result.plans) {
    planned.insert(p.item_id);
    EXPECT_FALSE(p.rules_applied.empty());
    const std::string family =
        p.criterion == Criterion::kCoherence ? "coherence." : "completeness.";
    for (const auto& r : p.rules_applied) EXPECT_EQ(r.rfind(family, 0), 0u) << r;
    for (const auto& c : p.candidates) EXPECT_NE(c.original, c.corrupted);
  }
  for (std::size_t i = 0; i < syn.corpus.size(); ++i) {
    const auto& before = syn.corpus[i];
    const auto& after = result.corpus[i];
    EXPECT_EQ(before.article, after.article);
    EXPECT_EQ(before.reference, after.reference);
    for (std::size_t c = 0; c < before.candidates.size(); ++c) {
      EXPECT_EQ(before.candidates[c].text == after.candidates[c].text,
                !planned.count(before.id));
    }
  }
}

TEST(Corpus, DeterministicParallelAndReplay) {
  const auto syn = testing::synthetic_corpus(30, 3);
  CorruptionOptions options;
  options.seed = 11;
  options.lexicons = load_conjunction_lexicons(testing::lexicon_dir());
  const auto a = corrupt_corpus(syn.corpus, syn.sidecar, options);
  options.jobs = 4;
  const auto b = corrupt_corpus(syn.corpus, syn.sidecar, options);
  std::string pa, pb;
  for (const auto& p : a.plans) pa += serialize_plan(p) + "\n";
  for (const auto& p : b.plans) pb += serialize_plan(p) + "\n";
  EXPECT_EQ(pa, pb);

  std::istringstream in(pa);
  const auto parsed = parse_plans(in);
  ASSERT_EQ(parsed.size(), a.plans.size());
  EXPECT_EQ(parsed[0].seed, a.plans[0].seed);
  EXPECT_EQ(parsed[0].rules_applied, a.plans[0].rules_applied);
  const auto replayed = replay_plans(syn.corpus, syn.sidecar, parsed, options);
  for (std::size_t i = 0; i < syn.corpus.size(); ++i) {
    EXPECT_EQ(serialize_record(replayed.corpus[i]), serialize_record(a.corpus[i]));
  }
  options.seed = 12;
  const auto c = corrupt_corpus(syn.corpus, syn.sidecar, options);
  std::string pc;
  for (const auto& p : c.plans) pc += serialize_plan(p) + "\n";
  EXPECT_NE(pa, pc);
}

TEST(Corpus, PlanErrors) {
  std::istringstream bad_rng(
      R"({"item_id":"a","criterion":"coherence","seed":1,"rng":"other"})" "\n");
  EXPECT_THROW(parse_plans(bad_rng), ValidationError);
  std::istringstream neg(R"({"item_id":"a","criterion":"coherence","seed":-1})" "\n");
  EXPECT_THROW(parse_plans(neg), ValidationError);
  const auto syn = testing::synthetic_corpus(3, 1);
  CorruptionPlan unknown;
  unknown.item_id = "nope";
  EXPECT_THROW(replay_plans(syn.corpus, syn.sidecar, {unknown}, {}), ValidationError);
}

TEST(Corpus, MissingSidecarNamesRecord) {
  const auto syn = testing::synthetic_corpus(6, 4);
  Sidecar partial;
  for (const auto& [key, tokens] : syn.sidecar.entries()) {
    if (std::get<0>(key) != "syn-002") partial.add(key, tokens);
  }
  CorruptionOptions options;
  options.fraction = 1.0;
  try {
    corrupt_corpus(syn.corpus, partial, options);
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("syn-002"), std::string::npos);
  }
}

TEST(Corpus, CorruptedSidecarBindsCorruptedText) {
  const auto syn = testing::synthetic_corpus(9, 5);
  CorruptionOptions options;
  options.seed = 2;
  options.lexicons = load_conjunction_lexicons(testing::lexicon_dir());
  const auto result = corrupt_corpus(syn.corpus, syn.sidecar, options);
  std::istringstream in(corrupted_sidecar(syn.sidecar, result.plans));
  const auto sidecar = parse_sidecar(in);
  for (const auto& rec : result.corpus) {
    for (const auto& c : rec.candidates) {
      const auto doc = sidecar.bind(rec.id, Side::kCandidate, c.system_id, c.text);
      EXPECT_EQ(doc.source_text, c.text);
    }
  }
}

}  // namespace
}  // namespace mlsumeval
