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

#include "mlsumeval/cli.hpp"

#include <algorithm>
#include <exception>
#include <fstream>
#include <map>
#include <memory>
#include <set>
#include <thread>

#include "json.hpp"
#include "mlsumeval/agreement.hpp"
#include "mlsumeval/corruption.hpp"
#include "mlsumeval/intrinsic.hpp"
#include "mlsumeval/remote.hpp"
#include "mlsumeval/rng.hpp"

namespace mlsumeval {

namespace fs = std::filesystem;

namespace {

constexpr std::pair<Metric, std::string_view> kMetricIds[] = {
    {Metric::kRouge1, "rouge1"},       {Metric::kRouge2, "rouge2"},
    {Metric::kRouge3, "rouge3"},       {Metric::kRougeL, "rougeL"},
    {Metric::kBleu, "bleu"},           {Metric::kBleuLemma, "bleu-lemma"},
    {Metric::kChrf, "chrf"},           {Metric::kBertScore, "bertscore"},
    {Metric::kMoverScore, "moverscore"},
};

const std::set<std::string> kCommands{"score", "corrupt", "stats", "analyze",
                                      "correlate"};

fs::path with_suffix(const fs::path& p, std::string_view suffix) {
  return fs::path(p.string() + std::string(suffix));
}

// Runs fn(i) for i in [0, n) on up to `jobs` threads; the first exception
// in index order is rethrown.
template <typename Fn>
void parallel_for(std::size_t n, std::size_t jobs, Fn&& fn) {
  std::vector<std::exception_ptr> errors(n);
  auto guarded = [&](std::size_t i) {
    try {
      fn(i);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };
  const std::size_t workers = std::max<std::size_t>(1, std::min(jobs, n));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) guarded(i);
  } else {
    std::vector<std::thread> threads;
    for (std::size_t w = 0; w < workers; ++w) {
      threads.emplace_back([&, w] {
        for (std::size_t i = w; i < n; i += workers) guarded(i);
      });
    }
    for (auto& t : threads) t.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

void require_path(const fs::path& p, const char* flag, const std::string& cmd) {
  if (p.empty()) {
    throw ValidationError(cmd + " requires " + flag);
  }
  if (!fs::exists(p)) {
    throw ValidationError(std::string(flag) + " " + p.string() + " does not exist");
  }
}

bool is_url(const std::string& s) { return s.rfind("http://", 0) == 0 || s.rfind("https://", 0) == 0; }

std::vector<Metric> resolve_metrics(const RunConfig& c) {
  std::vector<Metric> out;
  for (const auto& id : c.metrics) out.push_back(*parse_metric(id));
  return out;
}

std::vector<Criterion> resolve_criteria(const RunConfig& c) {
  std::vector<Criterion> out;
  for (const auto& id : c.criteria) out.push_back(*parse_criterion(id));
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace

std::string_view to_string(Metric m) {
  for (const auto& [id, name] : kMetricIds) {
    if (id == m) return name;
  }
  return "";
}

std::optional<Metric> parse_metric(std::string_view s) {
  for (const auto& [id, name] : kMetricIds) {
    if (name == s) return id;
  }
  if (s == "rougel") return Metric::kRougeL;
  return std::nullopt;
}

bool needs_embeddings(Metric m) {
  return m == Metric::kBertScore || m == Metric::kMoverScore;
}

bool uses_tokenizer(Metric m) {
  return m == Metric::kRouge1 || m == Metric::kRouge2 || m == Metric::kRouge3 ||
         m == Metric::kRougeL || m == Metric::kBleu;
}

std::string metric_label(Metric m, const TokenizerSpec& spec) {
  std::string label(to_string(m));
  if (uses_tokenizer(m) &&
      !std::holds_alternative<WhitespaceMode>(spec.mode)) {
    label += "+" + spec.name();
  }
  return label;
}

TokenizerSpec parse_tokenizer(std::string_view s, bool lowercase,
                              Diagnostics* diag) {
  TokenizerSpec spec;
  if (s == "whitespace") {
    spec = TokenizerSpec::whitespace();
  } else if (s == "char") {
    spec = TokenizerSpec::character();
  } else if (s == "pretok:surface") {
    spec = TokenizerSpec::pretokenized(PretokenizedField::kSurface);
  } else if (s == "pretok:lemma") {
    spec = TokenizerSpec::pretokenized(PretokenizedField::kLemma);
  } else if (s.rfind("subword:", 0) == 0 && s.size() > 8) {
    auto vocab = std::make_shared<const SubwordVocab>(
        load_subword_vocab(fs::path(std::string(s.substr(8))), !lowercase, diag));
    spec = TokenizerSpec::subword(std::move(vocab));
  } else {
    throw ValidationError("unknown tokenizer \"" + std::string(s) +
                          "\" (whitespace, char, subword:<vocab>, "
                          "pretok:surface, pretok:lemma)");
  }
  spec.lowercase = spec.lowercase || lowercase;
  return spec;
}

void validate_config(const RunConfig& c) {
  if (!kCommands.count(c.command)) {
    throw ValidationError("unknown command \"" + c.command + "\"");
  }
  const std::string& cmd = c.command;
  if (c.out.empty()) throw ValidationError(cmd + " requires --out");
  if (c.jobs < 1) throw ValidationError("--jobs must be at least 1");
  require_path(c.corpus, "--corpus", cmd);

  const std::string& tok = c.tokenizer;
  const bool pretok = tok.rfind("pretok:", 0) == 0;
  const bool tok_known = tok == "whitespace" || tok == "char" ||
                         tok == "pretok:surface" || tok == "pretok:lemma" ||
                         (tok.rfind("subword:", 0) == 0 && tok.size() > 8);
  if (!tok_known) {
    throw ValidationError("unknown tokenizer \"" + tok + "\"");
  }
  if (tok.rfind("subword:", 0) == 0) {
    require_path(tok.substr(8), "subword vocabulary", cmd);
  }

  if (cmd == "score") {
    if (c.metrics.empty()) throw ValidationError("score requires --metric");
    bool tokenized = false;
    for (const auto& id : c.metrics) {
      const auto m = parse_metric(id);
      if (!m) throw ValidationError("unknown metric \"" + id + "\"");
      if (needs_embeddings(*m) && c.embeddings.empty()) {
        throw ValidationError(id + " requires --embeddings <path|url>");
      }
      if (*m == Metric::kBleuLemma) {
        if (c.sidecar.empty()) throw ValidationError("bleu-lemma requires --sidecar");
        if (tok != "whitespace" && tok != "pretok:lemma") {
          throw ValidationError("bleu-lemma reads lemmas and cannot use tokenizer " + tok);
        }
      }
      tokenized = tokenized || uses_tokenizer(*m);
    }
    if (pretok && tokenized && c.sidecar.empty()) {
      throw ValidationError("tokenizer " + tok + " requires --sidecar");
    }
    if (!c.sidecar.empty()) require_path(c.sidecar, "--sidecar", cmd);
    if (!c.embeddings.empty() && !is_url(c.embeddings)) {
      require_path(c.embeddings, "--embeddings", cmd);
    }
  } else if (cmd == "corrupt") {
    require_path(c.sidecar, "--sidecar", cmd);
    if (!c.seed) throw ValidationError("corrupt requires --seed");
    if (!(c.fraction > 0.0 && c.fraction <= 1.0)) {
      throw ValidationError("--fraction must lie in (0, 1]");
    }
    if (!parse_entity_mode(c.entity_mode)) {
      throw ValidationError("unknown entity mode \"" + c.entity_mode +
                            "\" (swap, replace)");
    }
    if (!c.lexicons.empty() && !fs::is_directory(c.lexicons)) {
      throw ValidationError("--lexicons " + c.lexicons.string() +
                            " is not a directory");
    }
    if (!c.replay.empty()) require_path(c.replay, "--replay", cmd);
  } else if (cmd == "stats") {
    if (pretok) throw ValidationError("stats needs a raw-text tokenizer, not " + tok);
  } else if (cmd == "analyze") {
    require_path(c.annotations, "--annotations", cmd);
  } else if (cmd == "correlate") {
    require_path(c.annotations, "--annotations", cmd);
    require_path(c.scores, "--scores", cmd);
    if (!parse_group_by(c.group_by)) {
      throw ValidationError("unknown --group-by \"" + c.group_by +
                            "\" (lang, family, resource)");
    }
    if (!parse_method(c.method)) {
      throw ValidationError("unknown --method \"" + c.method +
                            "\" (pearson, spearman)");
    }
    if (c.criteria.empty()) throw ValidationError("--criterion list is empty");
    for (const auto& id : c.criteria) {
      if (!parse_criterion(id)) {
        throw ValidationError("unknown criterion \"" + id + "\"");
      }
    }
  }
}

std::string config_json(const RunConfig& c) {
  auto path = [](const fs::path& p) {
    return p.empty() ? nlohmann::ordered_json(nullptr)
                     : nlohmann::ordered_json(p.generic_string());
  };
  nlohmann::ordered_json j;
  j["tool"] = "mlsumeval";
  j["version"] = std::string(kVersion);
  j["rng"] = std::string(Rng::kVersion);
  j["command"] = c.command;
  j["corpus"] = path(c.corpus);
  j["annotations"] = path(c.annotations);
  j["sidecar"] = path(c.sidecar);
  j["embeddings"] = c.embeddings.empty() ? nlohmann::ordered_json(nullptr)
                                         : nlohmann::ordered_json(c.embeddings);
  j["scores"] = path(c.scores);
  j["lexicons"] = path(c.lexicons);
  j["replay"] = path(c.replay);
  j["metrics"] = c.metrics;
  j["tokenizer"] = c.tokenizer;
  j["lowercase"] = c.lowercase;
  j["idf"] = c.idf;
  j["seed"] = c.seed ? nlohmann::ordered_json(*c.seed) : nlohmann::ordered_json(nullptr);
  j["fraction"] = c.fraction;
  j["entity_mode"] = c.entity_mode;
  j["verbs_only"] = c.verbs_only;
  j["group_by"] = c.group_by;
  j["method"] = c.method;
  j["criteria"] = c.criteria;
  j["elo"] = {{"initial", EloConfig{}.initial},
              {"k_factor", EloConfig{}.k_factor},
              {"shuffle_rounds", c.elo_shuffle_rounds}};
  j["layer"] = c.layer ? nlohmann::ordered_json(*c.layer) : nlohmann::ordered_json(nullptr);
  j["jobs"] = c.jobs;
  j["out"] = path(c.out);
  return j.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Scoring

ScoreTable score_corpus(const Corpus& corpus, const std::vector<Metric>& metrics,
                        const TokenizerSpec& spec, const Sidecar* sidecar,
                        const EmbeddingStore* embeddings, bool idf,
                        std::size_t jobs, Diagnostics* diag) {
  bool tokenized = false, lemma = false, embedded = false;
  for (auto m : metrics) {
    tokenized = tokenized || uses_tokenizer(m);
    lemma = lemma || m == Metric::kBleuLemma;
    embedded = embedded || needs_embeddings(m);
  }
  if ((lemma || (tokenized && spec.is_pretokenized())) && !sidecar) {
    throw ValidationError("scoring needs a sidecar for lemma or pretokenized input");
  }
  if (embedded && !embeddings) {
    throw ValidationError("embedding metrics need an embeddings source");
  }
  std::optional<IdfWeights> idf_weights;
  if (embedded && idf) {
    std::vector<std::vector<std::string>> docs;
    for (const auto& rec : corpus) {
      if (const auto* ref = embeddings->reference(rec.id)) docs.push_back(ref->tokens);
    }
    idf_weights = compute_idf(docs);
  }
  const IdfWeights* idf_ptr = idf_weights ? &*idf_weights : nullptr;

  std::vector<std::vector<std::pair<ScoreTable::key_type, double>>> rows(corpus.size());
  std::vector<Diagnostics> diags(corpus.size());
  parallel_for(corpus.size(), jobs, [&](std::size_t r) {
    const auto& rec = corpus[r];
    std::optional<AnnotatedDocument> ref_doc;
    auto reference_doc = [&]() -> const AnnotatedDocument& {
      if (!ref_doc) ref_doc = sidecar->bind(rec.id, Side::kReference, {}, rec.reference);
      return *ref_doc;
    };
    std::optional<TokenList> ref_tokens;
    if (tokenized) {
      ref_tokens = spec.is_pretokenized() ? tokenize(reference_doc(), spec)
                                          : tokenize(rec.reference, spec);
    }
    const EmbeddedText* ref_emb = nullptr;
    if (embedded) {
      ref_emb = embeddings->reference(rec.id);
      if (!ref_emb) {
        throw ValidationError("no reference embedding for item " + rec.id);
      }
    }
    for (const auto& cand : rec.candidates) {
      std::optional<AnnotatedDocument> cand_doc;
      auto candidate_doc = [&]() -> const AnnotatedDocument& {
        if (!cand_doc) {
          cand_doc = sidecar->bind(rec.id, Side::kCandidate, cand.system_id, cand.text);
        }
        return *cand_doc;
      };
      std::optional<TokenList> cand_tokens;
      if (tokenized) {
        cand_tokens = spec.is_pretokenized() ? tokenize(candidate_doc(), spec)
                                             : tokenize(cand.text, spec);
      }
      const EmbeddedText* cand_emb = nullptr;
      if (embedded) {
        cand_emb = embeddings->candidate(rec.id, cand.system_id);
        if (!cand_emb) {
          throw ValidationError("no candidate embedding for item " + rec.id +
                                ", system " + cand.system_id);
        }
      }
      for (auto m : metrics) {
        double value = 0.0;
        switch (m) {
          case Metric::kRouge1: value = rouge_n(*cand_tokens, *ref_tokens, 1).f1; break;
          case Metric::kRouge2: value = rouge_n(*cand_tokens, *ref_tokens, 2).f1; break;
          case Metric::kRouge3: value = rouge_n(*cand_tokens, *ref_tokens, 3).f1; break;
          case Metric::kRougeL: value = rouge_l(*cand_tokens, *ref_tokens).f1; break;
          case Metric::kBleu: value = bleu(*cand_tokens, *ref_tokens); break;
          case Metric::kBleuLemma:
            try {
              value = bleu_lemma(candidate_doc(), reference_doc());
            } catch (const ValidationError& e) {
              // No lemmatizer output for this text: reported as N.A.
              diags[r].warn("bleu-lemma N.A for " + rec.id + "/" + cand.system_id +
                            ": " + e.what());
              continue;
            }
            break;
          case Metric::kChrf: value = chrf(cand.text, rec.reference); break;
          case Metric::kBertScore:
            value = bertscore(*cand_emb, *ref_emb, idf_ptr).f1;
            break;
          case Metric::kMoverScore:
            value = moverscore(*cand_emb, *ref_emb, idf_ptr, &diags[r]);
            break;
        }
        rows[r].push_back({{rec.id, cand.system_id, metric_label(m, spec)}, value});
      }
    }
  });
  ScoreTable out;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (diag) diag->merge(diags[r]);
    for (auto& [key, value] : rows[r]) {
      if (!out.emplace(key, value).second) {
        throw ValidationError("duplicate (item, system) pair " + std::get<0>(key) +
                              ", " + std::get<1>(key));
      }
    }
  }
  return out;
}

EmbeddingStore embed_corpus_remote(const Corpus& corpus,
                                   const std::string& endpoint,
                                   std::optional<int> layer, std::size_t jobs) {
  struct Slot {
    std::string item;
    std::optional<std::string> system;  // nullopt: reference
  };
  std::vector<Slot> slots;
  std::vector<std::string> texts;
  for (const auto& rec : corpus) {
    slots.push_back({rec.id, std::nullopt});
    texts.push_back(rec.reference);
    for (const auto& c : rec.candidates) {
      slots.push_back({rec.id, c.system_id});
      texts.push_back(c.text);
    }
  }
  constexpr std::size_t kBatch = 16;
  const std::size_t batches = (texts.size() + kBatch - 1) / kBatch;
  std::vector<std::vector<EmbeddedText>> results(batches);
  RemoteOptions options;
  options.layer = layer;
  parallel_for(batches, jobs, [&](std::size_t b) {
    const auto first = texts.begin() + static_cast<std::ptrdiff_t>(b * kBatch);
    const auto last = texts.begin() + static_cast<std::ptrdiff_t>(
                                          std::min(texts.size(), (b + 1) * kBatch));
    results[b] = remote_embed(endpoint, std::vector<std::string>(first, last), options);
  });
  EmbeddingStore store;
  std::size_t i = 0;
  for (auto& batch : results) {
    for (auto& e : batch) {
      const auto& slot = slots[i++];
      if (slot.system) {
        store.add_candidate(slot.item, *slot.system, std::move(e));
      } else {
        store.add_reference(slot.item, std::move(e));
      }
    }
  }
  return store;
}

std::string render_scores(const ScoreTable& scores) {
  std::string out;
  for (const auto& [key, value] : scores) {
    out += serialize_score_line({std::get<0>(key), std::get<1>(key),
                                 std::get<2>(key), value}) +
           "\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// Commands

CommandOutput cmd_score(const RunConfig& c) {
  CommandOutput out;
  const auto metrics = resolve_metrics(c);
  const auto spec = parse_tokenizer(c.tokenizer, c.lowercase, &out.diagnostics);
  const Corpus corpus = load_corpus(c.corpus);
  std::optional<Sidecar> sidecar;
  if (!c.sidecar.empty()) sidecar = load_sidecar(c.sidecar);
  std::optional<EmbeddingStore> store;
  const bool embedded = std::any_of(metrics.begin(), metrics.end(), needs_embeddings);
  if (embedded) {
    store = is_url(c.embeddings)
                ? embed_corpus_remote(corpus, c.embeddings, c.layer, c.jobs)
                : load_embeddings(c.embeddings, &out.diagnostics);
  }
  const auto table =
      score_corpus(corpus, metrics, spec, sidecar ? &*sidecar : nullptr,
                   store ? &*store : nullptr, c.idf, c.jobs, &out.diagnostics);
  out.files.emplace_back(c.out, render_scores(table));
  return out;
}

CommandOutput cmd_corrupt(const RunConfig& c) {
  CommandOutput out;
  const Corpus corpus = load_corpus(c.corpus);
  const Sidecar sidecar = load_sidecar(c.sidecar);
  CorruptionOptions options;
  options.fraction = c.fraction;
  options.seed = *c.seed;
  options.entity_mode = *parse_entity_mode(c.entity_mode);
  options.verbs_only = c.verbs_only;
  options.jobs = c.jobs;
  if (!c.lexicons.empty()) {
    options.lexicons = load_conjunction_lexicons(c.lexicons);
  } else {
    out.diagnostics.warn("no --lexicons given; coherence fallback removes words only");
  }
  std::set<std::string> langs;
  for (const auto& r : corpus) langs.insert(r.lang);
  for (const auto& lang : langs) {
    if (!c.lexicons.empty() && !options.lexicons.count(lang)) {
      out.diagnostics.warn("no conjunction lexicon for " + lang +
                           "; coherence fallback removes words only");
    }
  }
  CorruptionResult result;
  if (!c.replay.empty()) {
    std::ifstream in(c.replay, std::ios::binary);
    if (!in) throw IoError("cannot open " + c.replay.string());
    result = replay_plans(corpus, sidecar, parse_plans(in), options, &out.diagnostics);
  } else {
    result = corrupt_corpus(corpus, sidecar, options, &out.diagnostics);
  }
  std::string plans;
  for (const auto& p : result.plans) plans += serialize_plan(p) + "\n";
  out.files.emplace_back(c.out, serialize_corpus(result.corpus));
  out.files.emplace_back(with_suffix(c.out, ".plans.jsonl"), std::move(plans));
  out.files.emplace_back(with_suffix(c.out, ".sidecar.jsonl"),
                         corrupted_sidecar(sidecar, result.plans));
  return out;
}

CommandOutput cmd_stats(const RunConfig& c) {
  CommandOutput out;
  const auto spec = parse_tokenizer(c.tokenizer, c.lowercase, &out.diagnostics);
  const Corpus corpus = load_corpus(c.corpus);
  const auto reports = corpus_stats(corpus, spec, &out.diagnostics);
  out.files.emplace_back(c.out, render_intrinsic_table(reports));
  out.files.emplace_back(with_suffix(c.out, ".jsonl"), intrinsic_jsonl(reports));
  return out;
}

CommandOutput cmd_analyze(const RunConfig& c) {
  CommandOutput out;
  const Corpus corpus = load_corpus(c.corpus);
  const AnnotationSet annotations = load_annotations(c.annotations);
  EloConfig elo;
  elo.shuffle_rounds = c.elo_shuffle_rounds;
  elo.seed = c.seed.value_or(0);
  const auto analysis = analyze_annotations(corpus, annotations, elo, &out.diagnostics);
  out.files.emplace_back(c.out, render_annotation_table(analysis) + "\n" +
                                    render_elo_table(analysis));
  out.files.emplace_back(with_suffix(c.out, ".jsonl"), annotation_jsonl(analysis));
  return out;
}

CommandOutput cmd_correlate(const RunConfig& c) {
  CommandOutput out;
  const Corpus corpus = load_corpus(c.corpus);
  const AnnotationSet annotations = load_annotations(c.annotations);
  const ScoreTable scores = load_scores(c.scores);
  const auto group_by = *parse_group_by(c.group_by);
  const auto method = *parse_method(c.method);
  // Table order: known metrics in their canonical order (tokenizer
  // variants after the plain metric), unknown ids last.
  auto metrics = score_metrics(scores);
  auto rank = [](const std::string& label) {
    const auto m = parse_metric(label.substr(0, label.find('+')));
    return std::make_pair(m ? static_cast<int>(*m) : 1000, label);
  };
  std::sort(metrics.begin(), metrics.end(),
            [&](const auto& a, const auto& b) { return rank(a) < rank(b); });
  std::vector<MetricCorrelations> rows;
  for (const auto criterion : resolve_criteria(c)) {
    for (const auto& metric : metrics) {
      MetricCorrelations row;
      row.metric = metric;
      row.criterion = criterion;
      row.reports = correlate_grouped(metric_slice(scores, metric), annotations,
                                      criterion, corpus, group_by, method,
                                      &out.diagnostics);
      rows.push_back(std::move(row));
    }
  }
  out.files.emplace_back(c.out,
                         render_correlation_table(rows, group_order(corpus, group_by)));
  out.files.emplace_back(with_suffix(c.out, ".jsonl"), correlation_jsonl(rows));
  return out;
}

CommandOutput run_command(const RunConfig& config) {
  validate_config(config);
  CommandOutput out;
  if (config.command == "score") out = cmd_score(config);
  else if (config.command == "corrupt") out = cmd_corrupt(config);
  else if (config.command == "stats") out = cmd_stats(config);
  else if (config.command == "analyze") out = cmd_analyze(config);
  else out = cmd_correlate(config);
  out.files.emplace_back(with_suffix(config.out, ".config.json"), config_json(config));
  return out;
}

void write_outputs(const CommandOutput& output) {
  std::vector<fs::path> temps;
  auto cleanup = [&] {
    std::error_code ec;
    for (const auto& t : temps) fs::remove(t, ec);
  };
  try {
    for (const auto& [path, content] : output.files) {
      if (path.has_parent_path()) fs::create_directories(path.parent_path());
      const fs::path tmp = with_suffix(path, ".tmp");
      temps.push_back(tmp);
      std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
      f << content;
      f.close();
      if (!f) throw IoError("cannot write " + tmp.string());
    }
    for (std::size_t i = 0; i < temps.size(); ++i) {
      fs::rename(temps[i], output.files[i].first);
    }
  } catch (const fs::filesystem_error& e) {
    cleanup();
    throw IoError(e.what());
  } catch (...) {
    cleanup();
    throw;
  }
}

}  // namespace mlsumeval
