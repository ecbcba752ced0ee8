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

#include "mlsumeval/corruption.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <fstream>
#include <set>
#include <thread>

#include "jsonl.hpp"
#include "mlsumeval/unicode.hpp"

namespace mlsumeval {

namespace {

// ---------------------------------------------------------------------------
// Editable view of a document: sentences of tokens with the text between
// neighbouring tokens, the separators between sentences, and any text
// before the first or after the last sentence. Rules edit this view and
// to_doc() rebuilds byte spans.

struct Sent {
  std::vector<AnnotatedToken> toks;
  std::vector<std::string> gaps;  // gaps[i] lies between toks[i] and toks[i+1]
};

struct Layout {
  std::string prefix;
  std::vector<Sent> sents;
  std::vector<std::string> seps;  // seps[k] lies between sents[k] and sents[k+1]
  std::string suffix;
  std::vector<std::size_t> first_token;  // global index of each sentence's first token
};

Layout from_doc(const AnnotatedDocument& doc) {
  Layout l;
  const std::string& text = doc.source_text;
  l.sents.resize(doc.sentence_count());
  l.first_token.assign(doc.sentence_count(), 0);
  for (std::size_t g = 0; g < doc.tokens.size(); ++g) {
    const auto& t = doc.tokens[g];
    auto& s = l.sents.at(t.sentence_id);
    if (s.toks.empty()) {
      l.first_token[t.sentence_id] = g;
    } else {
      const auto prev_end = s.toks.back().end;
      s.gaps.push_back(text.substr(prev_end, t.begin - prev_end));
    }
    s.toks.push_back(t);
  }
  if (l.sents.empty()) {
    l.prefix = text;
    return l;
  }
  l.prefix = text.substr(0, l.sents.front().toks.front().begin);
  for (std::size_t k = 0; k + 1 < l.sents.size(); ++k) {
    const auto end = l.sents[k].toks.back().end;
    const auto next = l.sents[k + 1].toks.front().begin;
    l.seps.push_back(text.substr(end, next - end));
  }
  const auto last = l.sents.back().toks.back().end;
  l.suffix = text.substr(last);
  return l;
}

// Separator used when a sentence is added.
std::string default_separator(const Layout& l) {
  if (!l.seps.empty()) return l.seps.front();
  for (const auto& s : l.sents) {
    for (const auto& g : s.gaps) {
      if (g.find(' ') != std::string::npos) return " ";
    }
  }
  return l.sents.empty() ? "" : " ";
}

// Rebuilds a document; sentences left without tokens are dropped together
// with one neighbouring separator.
AnnotatedDocument to_doc(Layout l) {
  for (std::size_t k = l.sents.size(); k-- > 0;) {
    if (!l.sents[k].toks.empty()) continue;
    l.sents.erase(l.sents.begin() + static_cast<std::ptrdiff_t>(k));
    if (!l.seps.empty()) {
      const std::size_t drop = k < l.seps.size() ? k : l.seps.size() - 1;
      l.seps.erase(l.seps.begin() + static_cast<std::ptrdiff_t>(drop));
    }
  }
  std::string text = l.prefix;
  std::vector<AnnotatedToken> tokens;
  for (std::size_t k = 0; k < l.sents.size(); ++k) {
    if (k > 0) text += l.seps[k - 1];
    const auto& s = l.sents[k];
    for (std::size_t i = 0; i < s.toks.size(); ++i) {
      if (i > 0) text += s.gaps[i - 1];
      AnnotatedToken t = s.toks[i];
      t.sentence_id = k;
      t.begin = text.size();
      text += t.surface;
      t.end = text.size();
      tokens.push_back(std::move(t));
    }
  }
  text += l.suffix;
  return make_document(std::move(text), std::move(tokens));
}

bool has_pos(const AnnotatedToken& t, std::initializer_list<std::string_view> tags) {
  if (!t.pos) return false;
  return std::find(tags.begin(), tags.end(), *t.pos) != tags.end();
}

bool is_conjunction(const AnnotatedToken& t) { return has_pos(t, {"CONJ", "CCONJ"}); }

bool is_punct_token(const AnnotatedToken& t) {
  if (has_pos(t, {"PUNCT"})) return true;
  const auto cps = unicode::code_points(t.surface);
  return !cps.empty() && std::all_of(cps.begin(), cps.end(), unicode::is_punctuation);
}

// Entity label without its BIO/BILOU prefix; empty for non-entities.
std::string entity_label(const AnnotatedToken& t) {
  if (!t.ner || t.ner->empty() || *t.ner == "O") return {};
  const std::string& tag = *t.ner;
  if (tag.size() > 2 && tag[1] == '-' &&
      std::string_view("BIELSU").find(tag[0]) != std::string_view::npos) {
    return tag.substr(2);
  }
  return tag;
}

bool starts_entity(const AnnotatedToken& t) {
  return t.ner && t.ner->size() > 2 && (*t.ner)[1] == '-' &&
         ((*t.ner)[0] == 'B' || (*t.ner)[0] == 'S' || (*t.ner)[0] == 'U');
}

bool is_entity(const AnnotatedToken& t) { return !entity_label(t).empty(); }

// Replacement of the token run [first, last) of a document by `tokens`
// joined with `gaps`.
struct Splice {
  std::size_t last = 0;
  std::vector<AnnotatedToken> tokens;
  std::vector<std::string> gaps;
};

Splice splice_of(const AnnotatedDocument& src, const EntitySpan& e,
                 std::size_t target_last) {
  Splice s;
  s.last = target_last;
  for (std::size_t g = e.first; g < e.last; ++g) {
    if (g > e.first) {
      const auto prev_end = src.tokens[g - 1].end;
      s.gaps.push_back(src.source_text.substr(prev_end, src.tokens[g].begin - prev_end));
    }
    s.tokens.push_back(src.tokens[g]);
  }
  return s;
}

// Applies splices keyed by the global index of the first replaced token.
AnnotatedDocument apply_splices(const AnnotatedDocument& doc,
                                const std::map<std::size_t, Splice>& splices) {
  Layout l = from_doc(doc);
  for (std::size_t k = 0; k < l.sents.size(); ++k) {
    const Sent old = l.sents[k];
    const std::size_t base = l.first_token[k];
    Sent out;
    std::size_t i = 0;
    while (i < old.toks.size()) {
      if (i > 0) out.gaps.push_back(old.gaps[i - 1]);
      auto it = splices.find(base + i);
      if (it == splices.end()) {
        out.toks.push_back(old.toks[i]);
        ++i;
        continue;
      }
      const Splice& sp = it->second;
      for (std::size_t j = 0; j < sp.tokens.size(); ++j) {
        if (j > 0) out.gaps.push_back(sp.gaps[j - 1]);
        out.toks.push_back(sp.tokens[j]);
      }
      i = sp.last - base;
    }
    l.sents[k] = std::move(out);
  }
  return to_doc(std::move(l));
}

std::string lower(const std::string& s) { return unicode::to_lower(s); }

}  // namespace

// ---------------------------------------------------------------------------
// Coherence rules

AnnotatedDocument corrupt_coherence_lemma(const AnnotatedDocument& doc,
                                          bool verbs_only) {
  Layout l = from_doc(doc);
  for (auto& s : l.sents) {
    for (auto& t : s.toks) {
      const bool target =
          verbs_only ? has_pos(t, {"VERB"}) : has_pos(t, {"NOUN", "VERB"});
      if (!target) continue;
      if (!t.lemma || t.lemma->empty()) {
        throw ValidationError("token \"" + t.surface + "\" (" + *t.pos +
                              ") has no lemma");
      }
      t.surface = *t.lemma;
    }
  }
  return to_doc(std::move(l));
}

RuleOutput replace_conjunctions(const AnnotatedDocument& doc,
                                std::span<const std::string> lexicon, Rng& rng) {
  RuleOutput out;
  if (lexicon.empty()) {
    out.doc = doc;
    out.flags.push_back("no-conjunction-lexicon");
    return out;
  }
  Layout l = from_doc(doc);
  for (std::size_t k = 0; k < l.sents.size(); ++k) {
    auto& s = l.sents[k];
    bool found = false;
    for (auto& t : s.toks) {
      if (!is_conjunction(t)) continue;
      found = true;
      const std::string current = lower(t.surface);
      std::vector<std::string> choices;
      for (const auto& entry : lexicon) {
        if (lower(entry) != current) choices.push_back(entry);
      }
      if (choices.empty()) {
        out.flags.push_back("no-alternative-conjunction:" + std::to_string(k));
        continue;
      }
      t.surface = choices[rng.uniform_index(choices.size())];
      t.lemma = t.surface;
    }
    if (found) continue;
    std::vector<std::size_t> slots;
    for (std::size_t p = 1; p < s.toks.size(); ++p) {
      if (!is_punct_token(s.toks[p - 1]) && !is_punct_token(s.toks[p])) {
        slots.push_back(p);
      }
    }
    if (slots.empty()) {
      out.flags.push_back("no-conjunction-slot:" + std::to_string(k));
      continue;
    }
    const std::size_t p = slots[rng.uniform_index(slots.size())];
    AnnotatedToken conj;
    conj.surface = lexicon[rng.uniform_index(lexicon.size())];
    conj.lemma = conj.surface;
    conj.pos = "CCONJ";
    const std::string gap = s.gaps[p - 1];
    s.toks.insert(s.toks.begin() + static_cast<std::ptrdiff_t>(p), std::move(conj));
    s.gaps.insert(s.gaps.begin() + static_cast<std::ptrdiff_t>(p - 1), gap);
  }
  out.doc = to_doc(std::move(l));
  return out;
}

RuleOutput remove_random_words(const AnnotatedDocument& doc, Rng& rng) {
  RuleOutput out;
  Layout l = from_doc(doc);
  for (std::size_t k = 0; k < l.sents.size(); ++k) {
    auto& s = l.sents[k];
    std::vector<std::size_t> words, non_punct, any;
    for (std::size_t i = 0; i < s.toks.size(); ++i) {
      const auto& t = s.toks[i];
      if (is_entity(t)) continue;
      any.push_back(i);
      if (is_punct_token(t)) continue;
      non_punct.push_back(i);
      if (!is_conjunction(t)) words.push_back(i);
    }
    const auto& pool = !words.empty() ? words : !non_punct.empty() ? non_punct : any;
    if (pool.empty()) {
      out.flags.push_back("no-removable-token:" + std::to_string(k));
      continue;
    }
    const std::size_t i = pool[rng.uniform_index(pool.size())];
    if (s.toks.size() > 1) {
      // Keep the gap toward a following punctuation mark ("word." stays
      // glued), otherwise the gap before the removed token.
      const bool last = i + 1 == s.toks.size();
      const bool glue = !last && i > 0 && is_punct_token(s.toks[i + 1]);
      const std::size_t g = last || glue ? i - 1 : i;
      s.gaps.erase(s.gaps.begin() + static_cast<std::ptrdiff_t>(g));
    }
    s.toks.erase(s.toks.begin() + static_cast<std::ptrdiff_t>(i));
    if (s.toks.empty()) out.flags.push_back("empty-sentence:" + std::to_string(k));
  }
  out.doc = to_doc(std::move(l));
  return out;
}

RuleOutput corrupt_coherence_fallback(const AnnotatedDocument& doc,
                                      std::span<const std::string> lexicon,
                                      std::uint64_t seed) {
  if (doc.sentence_count() == 0) {
    throw ValidationError("fallback corruption needs at least one sentence");
  }
  Rng rng(seed);
  RuleOutput conj = replace_conjunctions(doc, lexicon, rng);
  RuleOutput removed = remove_random_words(conj.doc, rng);
  const bool removed_any = removed.doc.tokens.size() < conj.doc.tokens.size();
  if (lexicon.empty() && !removed_any) {
    throw ValidationError(
        "fallback corruption: no conjunction lexicon and no removable token");
  }
  removed.flags.insert(removed.flags.begin(), conj.flags.begin(), conj.flags.end());
  return removed;
}

RuleOutput corrupt_coherence_reorder(const AnnotatedDocument& doc,
                                     std::uint64_t seed) {
  const std::size_t n = doc.sentence_count();
  if (n < 2) {
    throw NotApplicable("reorder needs at least two sentences, found " +
                        std::to_string(n));
  }
  RuleOutput out;
  Layout l = from_doc(doc);
  std::size_t i = 0, j = 1;
  if (n == 2) {
    out.flags.push_back("adjacent-swap");
  } else {
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = a + 2; b < n; ++b) pairs.emplace_back(a, b);
    }
    Rng rng(seed);
    std::tie(i, j) = pairs[rng.uniform_index(pairs.size())];
  }
  std::swap(l.sents[i], l.sents[j]);
  out.flags.push_back("swapped:" + std::to_string(i) + "," + std::to_string(j));
  out.doc = to_doc(std::move(l));
  return out;
}

// ---------------------------------------------------------------------------
// Completeness rules

std::string_view to_string(EntityMode m) {
  return m == EntityMode::kSwapWithinSummary ? "swap" : "replace";
}

std::optional<EntityMode> parse_entity_mode(std::string_view s) {
  if (s == "swap") return EntityMode::kSwapWithinSummary;
  if (s == "replace") return EntityMode::kReplaceFromArticle;
  return std::nullopt;
}

std::vector<EntitySpan> find_entities(const AnnotatedDocument& doc) {
  std::vector<EntitySpan> out;
  const auto& toks = doc.tokens;
  std::size_t g = 0;
  while (g < toks.size()) {
    const std::string label = entity_label(toks[g]);
    if (label.empty()) {
      ++g;
      continue;
    }
    std::size_t e = g + 1;
    while (e < toks.size() && toks[e].sentence_id == toks[g].sentence_id &&
           entity_label(toks[e]) == label && !starts_entity(toks[e])) {
      ++e;
    }
    EntitySpan span;
    span.label = label;
    span.first = g;
    span.last = e;
    span.text = doc.source_text.substr(toks[g].begin, toks[e - 1].end - toks[g].begin);
    out.push_back(std::move(span));
    g = e;
  }
  return out;
}

AnnotatedDocument corrupt_completeness_entity(const AnnotatedDocument& doc,
                                              EntityMode mode,
                                              const AnnotatedDocument* article,
                                              std::uint64_t seed) {
  Rng rng(seed);
  const auto ents = find_entities(doc);
  std::map<std::size_t, Splice> splices;
  if (mode == EntityMode::kSwapWithinSummary) {
    std::map<std::string, std::vector<std::size_t>> by_label;
    for (std::size_t k = 0; k < ents.size(); ++k) by_label[ents[k].label].push_back(k);
    for (const auto& [label, group] : by_label) {
      std::set<std::string> distinct;
      for (auto k : group) distinct.insert(ents[k].text);
      if (distinct.size() < 2) continue;
      auto perm = group;
      rng.shuffle(perm);
      bool unchanged = true;
      for (std::size_t k = 0; k < group.size(); ++k) {
        unchanged = unchanged && ents[perm[k]].text == ents[group[k]].text;
      }
      if (unchanged) {
        perm = group;
        std::rotate(perm.begin(), perm.begin() + 1, perm.end());
      }
      for (std::size_t k = 0; k < group.size(); ++k) {
        const auto& target = ents[group[k]];
        splices.emplace(target.first, splice_of(doc, ents[perm[k]], target.last));
      }
    }
    if (splices.empty()) {
      throw NotApplicable("entity swap needs two distinct entities of one label");
    }
  } else {
    if (!article) throw NotApplicable("entity replacement needs the article");
    const auto source = find_entities(*article);
    std::vector<std::pair<std::size_t, std::vector<std::size_t>>> options;
    for (std::size_t k = 0; k < ents.size(); ++k) {
      std::vector<std::size_t> alts;
      std::set<std::string> seen;
      for (std::size_t a = 0; a < source.size(); ++a) {
        if (source[a].label == ents[k].label && source[a].text != ents[k].text &&
            seen.insert(source[a].text).second) {
          alts.push_back(a);
        }
      }
      if (!alts.empty()) options.emplace_back(k, std::move(alts));
    }
    if (options.empty()) {
      throw NotApplicable("article has no different entity of a summary label");
    }
    const auto& [k, alts] = options[rng.uniform_index(options.size())];
    const auto& pick = source[alts[rng.uniform_index(alts.size())]];
    splices.emplace(ents[k].first, splice_of(*article, pick, ents[k].last));
  }
  return apply_splices(doc, splices);
}

AnnotatedDocument insert_sentence(const AnnotatedDocument& doc,
                                  const AnnotatedDocument& donor,
                                  std::size_t sentence, std::size_t boundary) {
  if (sentence >= donor.sentence_count()) {
    throw ValidationError("donor sentence index out of range");
  }
  Layout l = from_doc(doc);
  if (boundary > l.sents.size()) throw ValidationError("insertion boundary out of range");
  const Layout d = from_doc(donor);
  const std::string sep = default_separator(l);
  if (!l.sents.empty()) {
    l.seps.insert(l.seps.begin() + static_cast<std::ptrdiff_t>(
                                       std::min(boundary, l.seps.size())),
                  sep);
  }
  l.sents.insert(l.sents.begin() + static_cast<std::ptrdiff_t>(boundary),
                 d.sents[sentence]);
  return to_doc(std::move(l));
}

namespace {

// Donor choice shared by the single-document and corpus-level rules:
// a document among those with sentences, then a sentence, then a boundary.
template <typename Get>
AnnotatedDocument insert_from_pool(const AnnotatedDocument& doc, std::size_t size,
                                   Get&& get, std::uint64_t seed) {
  std::vector<std::size_t> eligible;
  for (std::size_t i = 0; i < size; ++i) {
    if (get(i).sentence_count() > 0) eligible.push_back(i);
  }
  if (eligible.empty()) {
    throw ValidationError("sentence insertion needs a nonempty donor pool");
  }
  Rng rng(seed);
  const AnnotatedDocument& donor = get(eligible[rng.uniform_index(eligible.size())]);
  const std::size_t sentence = rng.uniform_index(donor.sentence_count());
  const std::size_t boundary = rng.uniform_index(doc.sentence_count() + 1);
  return insert_sentence(doc, donor, sentence, boundary);
}

}  // namespace

AnnotatedDocument corrupt_completeness_insert(
    const AnnotatedDocument& doc, std::span<const AnnotatedDocument> donor_pool,
    std::uint64_t seed) {
  return insert_from_pool(
      doc, donor_pool.size(),
      [&](std::size_t i) -> const AnnotatedDocument& { return donor_pool[i]; },
      seed);
}

// ---------------------------------------------------------------------------
// Lexicons

ConjunctionLexicons load_conjunction_lexicons(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) {
    throw IoError("conjunction lexicon directory not found: " + dir.string());
  }
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".txt") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  ConjunctionLexicons out;
  for (const auto& path : files) {
    auto in = detail::open_input(path);
    auto& words = out[canonical_lang(path.stem().string())];
    std::string line;
    while (std::getline(in, line)) {
      line = detail::trim(line);
      if (line.empty() || line.front() == '#') continue;
      if (std::find(words.begin(), words.end(), line) == words.end()) {
        words.push_back(line);
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Corpus level

std::size_t corruption_count(double fraction, std::size_t n) {
  if (!(fraction > 0.0 && fraction <= 1.0)) {
    throw DomainError("corruption fraction must lie in (0, 1]");
  }
  return static_cast<std::size_t>(std::floor(fraction * static_cast<double>(n) + 1e-9));
}

std::vector<std::string> select_records(const Corpus& corpus, double fraction,
                                        std::uint64_t seed) {
  const std::size_t k = corruption_count(fraction, corpus.size());
  std::vector<std::pair<std::uint64_t, std::string>> ranked;
  for (const auto& r : corpus) {
    ranked.emplace_back(Rng::substream_seed(seed, "select/" + r.id), r.id);
  }
  std::sort(ranked.begin(), ranked.end());
  std::vector<std::string> out;
  for (std::size_t i = 0; i < k; ++i) out.push_back(ranked[i].second);
  return out;
}

std::map<std::string, DonorDocument> donor_documents(const Corpus& corpus,
                                                     const Sidecar& sidecar) {
  std::map<std::string, DonorDocument> out;
  for (const auto& r : corpus) {
    if (sidecar.find(r.id, Side::kArticle)) {
      out.emplace(r.id, DonorDocument{
                            r.lang, sidecar.bind(r.id, Side::kArticle, {}, r.article)});
    } else if (sidecar.find(r.id, Side::kReference)) {
      out.emplace(r.id, DonorDocument{r.lang, sidecar.bind(r.id, Side::kReference, {},
                                                           r.reference)});
    }
  }
  return out;
}

namespace {

struct CandidateOutcome {
  AnnotatedDocument doc;
  std::vector<std::string> rules;
  std::vector<std::string> flags;
};

void add_flags(std::vector<std::string>& to, std::string_view rule,
               const std::vector<std::string>& flags) {
  for (const auto& f : flags) to.push_back(std::string(rule) + ":" + f);
}

CandidateOutcome corrupt_coherence(const AnnotatedDocument& doc,
                                   const std::vector<std::string>& lexicon,
                                   bool verbs_only, std::uint64_t seed) {
  CandidateOutcome out{doc, {}, {}};
  try {
    auto lemma = corrupt_coherence_lemma(doc, verbs_only);
    if (lemma.source_text != doc.source_text) {
      out.doc = std::move(lemma);
      out.rules.emplace_back(rule::kLemma);
    } else {
      out.flags.emplace_back("coherence.lemma:no-change");
    }
  } catch (const ValidationError& e) {
    out.flags.push_back(std::string("coherence.lemma:") + e.what());
  }
  if (out.rules.empty()) {
    try {
      auto fb = corrupt_coherence_fallback(
          doc, lexicon, Rng::substream_seed(seed, "fallback"));
      add_flags(out.flags, rule::kFallback, fb.flags);
      if (fb.doc.source_text != doc.source_text) {
        out.doc = std::move(fb.doc);
        out.rules.emplace_back(rule::kFallback);
      }
    } catch (const ValidationError& e) {
      out.flags.push_back(std::string("coherence.fallback:") + e.what());
    }
  }
  if (out.doc.sentence_count() >= 2) {
    auto ro = corrupt_coherence_reorder(out.doc, Rng::substream_seed(seed, "reorder"));
    if (ro.doc.source_text != out.doc.source_text) {
      const bool adjacent = std::find(ro.flags.begin(), ro.flags.end(),
                                      "adjacent-swap") != ro.flags.end();
      out.rules.emplace_back(adjacent ? rule::kReorderAdjacent : rule::kReorder);
      add_flags(out.flags, rule::kReorder, ro.flags);
      out.doc = std::move(ro.doc);
    }
  }
  return out;
}

template <typename Pool>
CandidateOutcome corrupt_completeness(const AnnotatedDocument& doc,
                                      const AnnotatedDocument* article,
                                      EntityMode mode, const Pool& pool,
                                      std::uint64_t seed) {
  CandidateOutcome out{doc, {}, {}};
  try {
    auto ent = corrupt_completeness_entity(doc, mode, article,
                                           Rng::substream_seed(seed, "entity"));
    if (ent.source_text != doc.source_text) {
      out.doc = std::move(ent);
      out.rules.emplace_back(mode == EntityMode::kSwapWithinSummary
                                 ? rule::kEntitySwap
                                 : rule::kEntityReplace);
    }
  } catch (const NotApplicable& e) {
    out.flags.push_back(std::string("completeness.entity:") + e.what());
  }
  try {
    out.doc = insert_from_pool(
        out.doc, pool.size(),
        [&](std::size_t i) -> const AnnotatedDocument& { return *pool[i]; },
        Rng::substream_seed(seed, "insert"));
    out.rules.emplace_back(rule::kInsert);
  } catch (const ValidationError& e) {
    out.flags.push_back(std::string("completeness.insert:") + e.what());
  }
  return out;
}

}  // namespace

CorruptionPlan corrupt_record(const CorpusRecord& record, const Sidecar& sidecar,
                              Criterion criterion, std::uint64_t record_seed,
                              const CorruptionOptions& options,
                              const std::map<std::string, DonorDocument>& donors,
                              Diagnostics* diag) {
  if (record.candidates.empty()) {
    throw ValidationError("record " + record.id + ": no candidate summaries to corrupt");
  }
  std::vector<AnnotatedDocument> docs;
  for (const auto& c : record.candidates) {
    if (!sidecar.find(record.id, Side::kCandidate, c.system_id)) {
      throw ValidationError("record " + record.id +
                            ": no sidecar annotation for candidate " + c.system_id);
    }
    docs.push_back(sidecar.bind(record.id, Side::kCandidate, c.system_id, c.text));
  }
  std::vector<const AnnotatedDocument*> pool;
  for (const auto& [id, donor] : donors) {
    if (id != record.id && donor.lang == record.lang) pool.push_back(&donor.doc);
  }
  if (pool.empty()) {
    for (const auto& [id, donor] : donors) {
      if (id != record.id) pool.push_back(&donor.doc);
    }
  }
  const AnnotatedDocument* article = nullptr;
  std::optional<AnnotatedDocument> article_doc;
  if (options.entity_mode == EntityMode::kReplaceFromArticle &&
      sidecar.find(record.id, Side::kArticle)) {
    article_doc = sidecar.bind(record.id, Side::kArticle, {}, record.article);
    article = &*article_doc;
  }
  static const std::vector<std::string> kNoLexicon;
  auto lex_it = options.lexicons.find(record.lang);
  const auto& lexicon = lex_it == options.lexicons.end() ? kNoLexicon : lex_it->second;

  auto attempt = [&](Criterion c) -> std::optional<CorruptionPlan> {
    CorruptionPlan plan;
    plan.item_id = record.id;
    plan.criterion = c;
    plan.seed = record_seed;
    std::set<std::string> rules;
    for (std::size_t i = 0; i < docs.size(); ++i) {
      const auto& cand = record.candidates[i];
      const auto seed = Rng::substream_seed(record_seed, "candidate/" + cand.system_id);
      CandidateOutcome o =
          c == Criterion::kCoherence
              ? corrupt_coherence(docs[i], lexicon, options.verbs_only, seed)
              : corrupt_completeness(docs[i], article, options.entity_mode, pool, seed);
      if (o.doc.source_text == cand.text) return std::nullopt;
      rules.insert(o.rules.begin(), o.rules.end());
      plan.candidates.push_back({cand.system_id, std::move(o.rules), std::move(o.flags),
                                 cand.text, o.doc.source_text, std::move(o.doc)});
    }
    plan.rules_applied.assign(rules.begin(), rules.end());
    return plan;
  };

  if (auto plan = attempt(criterion)) return std::move(*plan);
  const Criterion other = criterion == Criterion::kCoherence ? Criterion::kCompleteness
                                                             : Criterion::kCoherence;
  if (diag) {
    diag->warn("record " + record.id + ": " + std::string(to_string(criterion)) +
               " rules left a candidate unchanged; using " +
               std::string(to_string(other)));
  }
  if (auto plan = attempt(other)) return std::move(*plan);
  throw ValidationError("record " + record.id +
                        ": no corruption rule changes every candidate");
}

namespace {

struct Job {
  const CorpusRecord* record;
  Criterion criterion;
  std::uint64_t seed;
};

CorruptionResult run_jobs(const Corpus& corpus, const Sidecar& sidecar,
                          const std::vector<Job>& jobs,
                          const CorruptionOptions& options, Diagnostics* diag) {
  const auto donors = donor_documents(corpus, sidecar);
  std::vector<std::optional<CorruptionPlan>> plans(jobs.size());
  std::vector<Diagnostics> diags(jobs.size());
  std::vector<std::exception_ptr> errors(jobs.size());
  auto work = [&](std::size_t i) {
    try {
      plans[i] = corrupt_record(*jobs[i].record, sidecar, jobs[i].criterion,
                                jobs[i].seed, options, donors, &diags[i]);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };
  const std::size_t workers = std::max<std::size_t>(1, std::min(options.jobs, jobs.size()));
  if (workers <= 1) {
    for (std::size_t i = 0; i < jobs.size(); ++i) work(i);
  } else {
    std::vector<std::thread> threads;
    for (std::size_t w = 0; w < workers; ++w) {
      threads.emplace_back([&, w] {
        for (std::size_t i = w; i < jobs.size(); i += workers) work(i);
      });
    }
    for (auto& t : threads) t.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  CorruptionResult result;
  result.corpus = corpus;
  std::map<std::string, const CorruptionPlan*> by_id;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    if (diag) diag->merge(diags[i]);
    result.plans.push_back(std::move(*plans[i]));
  }
  for (const auto& p : result.plans) by_id.emplace(p.item_id, &p);
  for (auto& rec : result.corpus) {
    auto it = by_id.find(rec.id);
    if (it == by_id.end()) continue;
    for (std::size_t c = 0; c < rec.candidates.size(); ++c) {
      rec.candidates[c].text = it->second->candidates[c].corrupted;
    }
  }
  return result;
}

}  // namespace

CorruptionResult corrupt_corpus(const Corpus& corpus, const Sidecar& sidecar,
                                const CorruptionOptions& options, Diagnostics* diag) {
  const auto ids = select_records(corpus, options.fraction, options.seed);
  const std::set<std::string> selected(ids.begin(), ids.end());
  std::vector<Job> jobs;
  for (const auto& rec : corpus) {
    if (!selected.count(rec.id)) continue;
    const auto seed = Rng::substream_seed(options.seed, "record/" + rec.id);
    Rng rng(seed);
    const auto criterion =
        rng.uniform_index(2) == 0 ? Criterion::kCoherence : Criterion::kCompleteness;
    jobs.push_back({&rec, criterion, seed});
  }
  return run_jobs(corpus, sidecar, jobs, options, diag);
}

CorruptionResult replay_plans(const Corpus& corpus, const Sidecar& sidecar,
                              const std::vector<CorruptionPlan>& plans,
                              const CorruptionOptions& options, Diagnostics* diag) {
  std::map<std::string, const CorruptionPlan*> by_id;
  for (const auto& p : plans) {
    if (!by_id.emplace(p.item_id, &p).second) {
      throw ValidationError("duplicate plan for record " + p.item_id);
    }
  }
  std::vector<Job> jobs;
  for (const auto& rec : corpus) {
    auto it = by_id.find(rec.id);
    if (it == by_id.end()) continue;
    jobs.push_back({&rec, it->second->criterion, it->second->seed});
    by_id.erase(it);
  }
  if (!by_id.empty()) {
    throw ValidationError("plan for unknown record " + by_id.begin()->first);
  }
  return run_jobs(corpus, sidecar, jobs, options, diag);
}

std::string serialize_plan(const CorruptionPlan& plan) {
  nlohmann::ordered_json j;
  j["item_id"] = plan.item_id;
  j["criterion"] = std::string(to_string(plan.criterion));
  j["rules_applied"] = plan.rules_applied;
  j["seed"] = plan.seed;
  j["rng"] = std::string(Rng::kVersion);
  j["candidates"] = nlohmann::ordered_json::array();
  for (const auto& c : plan.candidates) {
    nlohmann::ordered_json cj;
    cj["system"] = c.system_id;
    cj["rules"] = c.rules;
    cj["flags"] = c.flags;
    cj["original"] = c.original;
    cj["corrupted"] = c.corrupted;
    j["candidates"].push_back(std::move(cj));
  }
  return j.dump();
}

std::vector<CorruptionPlan> parse_plans(std::istream& in) {
  std::vector<CorruptionPlan> out;
  detail::for_each_json_line(in, [&](const detail::json& j, std::size_t line) {
    CorruptionPlan p;
    p.item_id = detail::require_string(j, "item_id", line);
    const auto crit = parse_criterion(detail::require_string(j, "criterion", line));
    if (!crit) {
      throw ValidationError("line " + std::to_string(line) + ": unknown criterion");
    }
    p.criterion = *crit;
    const auto& seed = detail::require(j, "seed", line);
    if (!seed.is_number_unsigned()) {
      throw ValidationError("line " + std::to_string(line) +
                            ": seed must be an unsigned integer");
    }
    p.seed = seed.get<std::uint64_t>();
    if (auto it = j.find("rng"); it != j.end() && *it != std::string(Rng::kVersion)) {
      throw ValidationError("line " + std::to_string(line) + ": plan written by rng " +
                            it->dump() + ", this build uses " +
                            std::string(Rng::kVersion));
    }
    if (auto it = j.find("rules_applied"); it != j.end() && it->is_array()) {
      p.rules_applied = it->get<std::vector<std::string>>();
    }
    out.push_back(std::move(p));
  });
  return out;
}

std::string corrupted_sidecar(const Sidecar& sidecar,
                              const std::vector<CorruptionPlan>& plans) {
  std::map<std::pair<std::string, std::string>, const CandidateCorruption*> corrupted;
  for (const auto& p : plans) {
    for (const auto& c : p.candidates) corrupted.emplace(std::make_pair(p.item_id, c.system_id), &c);
  }
  std::string out;
  std::set<std::pair<std::string, std::string>> written;
  for (const auto& [key, tokens] : sidecar.entries()) {
    const auto& [item, side, system] = key;
    if (side == Side::kCandidate && !system.empty()) {
      auto it = corrupted.find({item, system});
      if (it != corrupted.end()) {
        out += serialize_sidecar_line(item, side, system, it->second->doc) + "\n";
        written.insert({item, system});
        continue;
      }
    }
    out += serialize_sidecar_line(item, side, system, tokens) + "\n";
  }
  // Candidates annotated through a system-less entry get their own line.
  for (const auto& [key, c] : corrupted) {
    if (!written.count(key)) {
      out += serialize_sidecar_line(key.first, Side::kCandidate, key.second, c->doc) + "\n";
    }
  }
  return out;
}

}  // namespace mlsumeval
