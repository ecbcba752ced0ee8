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

#include "mlsumeval/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <tuple>

#include "jsonl.hpp"
#include "mlsumeval/report.hpp"

namespace mlsumeval {

using detail::json;

// ---------------------------------------------------------------------------
// Score files

std::string serialize_score_line(const ScoreLine& line) {
  nlohmann::ordered_json j;
  j["item_id"] = line.item_id;
  j["system"] = line.system_id;
  j["metric"] = line.metric;
  j["score"] = line.value;
  return j.dump();
}

ScoreTable parse_scores(std::istream& in) {
  ScoreTable out;
  detail::for_each_json_line(in, [&](const json& j, std::size_t line) {
    ScoreLine s;
    s.item_id = detail::require_string(j, "item_id", line);
    s.system_id = detail::require_string(j, "system", line);
    s.metric = detail::require_string(j, "metric", line);
    const json& v = detail::require(j, "score", line);
    if (!v.is_number()) {
      throw ValidationError("line " + std::to_string(line) +
                            ": field \"score\" must be a number");
    }
    s.value = v.get<double>();
    if (!std::isfinite(s.value)) {
      throw ValidationError("line " + std::to_string(line) +
                            ": score is not finite");
    }
    auto [it, inserted] =
        out.emplace(std::make_tuple(s.item_id, s.system_id, s.metric), s.value);
    if (!inserted) {
      throw ValidationError("line " + std::to_string(line) +
                            ": duplicate score for (" + s.item_id + ", " +
                            s.system_id + ", " + s.metric + ")");
    }
  });
  return out;
}

ScoreTable load_scores(const std::filesystem::path& path) {
  auto in = detail::open_input(path);
  return parse_scores(in);
}

std::vector<std::string> score_metrics(const ScoreTable& scores) {
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (const auto& [key, value] : scores) {
    const auto& metric = std::get<2>(key);
    if (seen.insert(metric).second) out.push_back(metric);
  }
  return out;
}

std::map<std::pair<std::string, std::string>, double> metric_slice(
    const ScoreTable& scores, const std::string& metric) {
  std::map<std::pair<std::string, std::string>, double> out;
  for (const auto& [key, value] : scores) {
    if (std::get<2>(key) == metric) {
      out.emplace(std::make_pair(std::get<0>(key), std::get<1>(key)), value);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Grouping

std::string_view to_string(GroupBy g) {
  switch (g) {
    case GroupBy::kLanguage: return "lang";
    case GroupBy::kFamily: return "family";
    case GroupBy::kResource: return "resource";
  }
  return "";
}

std::optional<GroupBy> parse_group_by(std::string_view s) {
  if (s == "lang" || s == "language") return GroupBy::kLanguage;
  if (s == "family") return GroupBy::kFamily;
  if (s == "resource") return GroupBy::kResource;
  return std::nullopt;
}

std::string group_label(const CorpusRecord& record, GroupBy by) {
  switch (by) {
    case GroupBy::kLanguage: return record.lang;
    case GroupBy::kFamily: return std::string(to_string(record.family));
    case GroupBy::kResource: return std::string(to_string(record.resource));
  }
  return {};
}

namespace {

// Report order of a record's group.
std::tuple<int, int, std::string> group_rank(const CorpusRecord& r, GroupBy by) {
  const int family = static_cast<int>(r.family);
  const int resource = -static_cast<int>(r.resource);
  switch (by) {
    case GroupBy::kLanguage: return {family, resource, r.lang};
    case GroupBy::kFamily: return {family, 0, ""};
    case GroupBy::kResource: return {0, resource, ""};
  }
  return {};
}

std::map<std::string, const CorpusRecord*> index_corpus(const Corpus& corpus) {
  std::map<std::string, const CorpusRecord*> out;
  for (const auto& r : corpus) out.emplace(r.id, &r);
  return out;
}

const CorpusRecord& lookup(const std::map<std::string, const CorpusRecord*>& idx,
                           const std::string& item, const char* what) {
  auto it = idx.find(item);
  if (it == idx.end()) {
    throw ValidationError(std::string(what) + " item \"" + item +
                          "\" is not in the corpus");
  }
  return *it->second;
}

}  // namespace

std::vector<std::string> group_order(const Corpus& corpus, GroupBy by) {
  std::map<std::tuple<int, int, std::string>, std::string> ordered;
  for (const auto& r : corpus) ordered.emplace(group_rank(r, by), group_label(r, by));
  std::vector<std::string> out;
  for (auto& [rank, label] : ordered) out.push_back(label);
  return out;
}

std::vector<CorrelationReport> correlate_grouped(
    const std::map<std::pair<std::string, std::string>, double>& scores,
    const AnnotationSet& annotations, Criterion criterion, const Corpus& corpus,
    GroupBy group_by, CorrelationMethod method, Diagnostics* diag) {
  const auto idx = index_corpus(corpus);
  struct Group {
    std::vector<double> metric;
    std::vector<double> human;
  };
  std::map<std::tuple<int, int, std::string>, std::pair<std::string, Group>> groups;
  std::size_t unmatched = 0;
  for (const auto& [key, value] : scores) {
    const auto& rec = lookup(idx, key.first, "score");
    auto& [label, g] = groups[group_rank(rec, group_by)];
    label = group_label(rec, group_by);
    const auto human = annotations.mean_score(key.first, key.second, criterion);
    if (!human) {
      ++unmatched;
      continue;
    }
    g.metric.push_back(value);
    g.human.push_back(*human);
  }
  if (unmatched > 0 && diag) {
    diag->warn(std::string(to_string(criterion)) + ": " +
               std::to_string(unmatched) +
               " scored (item, system) pairs have no human score");
  }
  std::vector<CorrelationReport> out;
  for (auto& [rank, entry] : groups) {
    auto& [label, g] = entry;
    const auto n = g.metric.size();
    if (n < 3) {
      if (diag) {
        diag->warn(std::string(to_string(criterion)) + ": group " + label +
                   " skipped, " + std::to_string(n) + " pairs (need 3)");
      }
      continue;
    }
    try {
      auto report = correlate(method, g.metric, g.human);
      report.group = label;
      out.push_back(std::move(report));
    } catch (const DomainError& e) {
      if (diag) {
        diag->warn(std::string(to_string(criterion)) + ": group " + label +
                   " skipped: " + e.what());
      }
    }
  }
  return out;
}

namespace {

std::string short_name(Criterion c) {
  return c == Criterion::kCoherence ? "Coh." : "Com.";
}

std::string display_lang(const std::string& lang) {
  std::string out = lang;
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char ch) { return std::toupper(ch); });
  return out;
}

}  // namespace

std::string render_correlation_table(const std::vector<MetricCorrelations>& rows,
                                     const std::vector<std::string>& groups) {
  std::vector<std::string> metrics;
  std::vector<Criterion> criteria;
  std::map<std::tuple<std::string, Criterion, std::string>, std::string> cells;
  for (const auto& row : rows) {
    if (std::find(metrics.begin(), metrics.end(), row.metric) == metrics.end()) {
      metrics.push_back(row.metric);
    }
    if (std::find(criteria.begin(), criteria.end(), row.criterion) ==
        criteria.end()) {
      criteria.push_back(row.criterion);
    }
    for (const auto& rep : row.reports) {
      cells[{row.metric, row.criterion, rep.group}] =
          fixed(rep.r) + std::string(significance_stars(rep.p_value));
    }
  }
  std::sort(criteria.begin(), criteria.end());
  std::vector<std::string> header{"Metric"};
  for (auto c : criteria) {
    for (const auto& g : groups) header.push_back(short_name(c) + " " + g);
  }
  TextTable table(header);
  for (const auto& m : metrics) {
    std::vector<std::string> line{m};
    for (auto c : criteria) {
      for (const auto& g : groups) {
        auto it = cells.find({m, c, g});
        line.push_back(it == cells.end() ? "N.A" : it->second);
      }
    }
    table.add_row(std::move(line));
  }
  return table.render();
}

std::string correlation_jsonl(const std::vector<MetricCorrelations>& rows) {
  std::string out;
  for (const auto& row : rows) {
    for (const auto& rep : row.reports) {
      nlohmann::ordered_json j;
      j["metric"] = row.metric;
      j["criterion"] = std::string(to_string(row.criterion));
      j["group"] = rep.group;
      j["method"] = std::string(to_string(rep.method));
      j["r"] = rep.r;
      j["p"] = rep.p_value;
      j["n"] = rep.n;
      out += j.dump() + "\n";
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Annotation statistics

namespace {

CriterionStats criterion_stats(
    const AnnotationSet& ann, Criterion c,
    const std::optional<std::pair<std::string, std::string>>& pair,
    const std::string& lang, Diagnostics* diag) {
  CriterionStats s;
  const std::string where = lang + " " + std::string(to_string(c));
  try {
    s.alpha = krippendorff_alpha(agreement_input(ann, c));
  } catch (const ValidationError& e) {
    if (diag) diag->warn(where + ": agreement not computable: " + e.what());
  }
  s.score = score_summary(ann, c);
  if (pair) {
    try {
      s.gap = score_gap(ann, c, pair);
    } catch (const ValidationError& e) {
      if (diag) diag->warn(where + ": score gap not computable: " + e.what());
    }
  }
  return s;
}

std::map<Criterion, EloRatings> elo_for(const AnnotationSet& ann,
                                        const EloConfig& config,
                                        const std::string& where,
                                        Diagnostics* diag) {
  std::map<Criterion, EloRatings> out;
  for (auto c : {Criterion::kCoherence, Criterion::kCompleteness}) {
    try {
      out.emplace(c, elo_rank(ann, c, config));
    } catch (const ValidationError& e) {
      if (diag) {
        diag->warn(where + " " + std::string(to_string(c)) + ": Elo skipped: " +
                   e.what());
      }
    }
  }
  return out;
}

}  // namespace

AnnotationAnalysis analyze_annotations(const Corpus& corpus,
                                       const AnnotationSet& annotations,
                                       const EloConfig& elo, Diagnostics* diag) {
  if (annotations.empty()) throw ValidationError("no annotations to analyze");
  const auto idx = index_corpus(corpus);
  std::map<std::tuple<int, int, std::string>, const CorpusRecord*> langs;
  for (const auto& r : annotations.records()) {
    const auto& rec = lookup(idx, r.item_id, "annotation");
    langs.emplace(group_rank(rec, GroupBy::kLanguage), &rec);
  }

  std::optional<std::pair<std::string, std::string>> pair;
  const auto systems = annotations.systems();
  if (systems.size() >= 2) {
    pair = std::make_pair(systems[0], systems[1]);
    if (systems.size() > 2 && diag) {
      diag->warn("score gap: " + std::to_string(systems.size()) +
                 " systems present, using " + systems[0] + " and " + systems[1]);
    }
  } else if (diag) {
    diag->warn("score gap needs two systems, found " +
               std::to_string(systems.size()));
  }

  AnnotationAnalysis out;
  out.elo = elo_for(annotations, elo, "all", diag);
  for (const auto& [rank, rec] : langs) {
    const std::string lang = rec->lang;
    const auto sub = annotations.filter_items([&](const std::string& item) {
      return idx.at(item)->lang == lang;
    });
    LanguageAnnotationStats s;
    s.lang = lang;
    s.family = rec->family;
    s.resource = rec->resource;
    s.coherence = criterion_stats(sub, Criterion::kCoherence, pair, lang, diag);
    s.completeness =
        criterion_stats(sub, Criterion::kCompleteness, pair, lang, diag);
    s.annotations = sub.size();
    out.languages.push_back(std::move(s));
    out.elo_by_lang.emplace(lang, elo_for(sub, elo, lang, diag));
  }
  return out;
}

namespace {

std::string alpha_cell(const std::optional<double>& a) {
  return a ? fixed(*a) : "N.A";
}

std::string mean_std_cell(const MeanStd& m) {
  if (m.n == 0) return "N.A";
  return fixed(m.mean, 1) + " (" + fixed(m.std, 1) + ")";
}

json mean_std_json(const MeanStd& m) {
  if (m.n == 0) return nullptr;
  return json{{"mean", m.mean}, {"std", m.std}, {"n", m.n}};
}

}  // namespace

std::string render_annotation_table(const AnnotationAnalysis& analysis) {
  TextTable t({"Lang.", "Agreement Coh.", "Com.", "Avg. Score (Std) Coh.",
               "Com.", "Avg. Gap (Std) Coh.", "Com.", "# Ann."});
  for (const auto& s : analysis.languages) {
    t.add_row({display_lang(s.lang), alpha_cell(s.coherence.alpha),
               alpha_cell(s.completeness.alpha), mean_std_cell(s.coherence.score),
               mean_std_cell(s.completeness.score),
               s.coherence.gap ? mean_std_cell(*s.coherence.gap) : "N.A",
               s.completeness.gap ? mean_std_cell(*s.completeness.gap) : "N.A",
               std::to_string(s.annotations)});
  }
  return t.render();
}

std::string render_elo_table(const AnnotationAnalysis& analysis) {
  std::set<std::string> systems;
  for (const auto& [c, ratings] : analysis.elo) {
    for (const auto& [sys, r] : ratings) systems.insert(sys);
  }
  std::vector<std::string> header{"Scope"};
  for (auto c : {Criterion::kCoherence, Criterion::kCompleteness}) {
    for (const auto& s : systems) header.push_back(short_name(c) + " " + s);
  }
  TextTable t(header);
  auto add = [&](const std::string& scope,
                 const std::map<Criterion, EloRatings>& elo) {
    std::vector<std::string> row{scope};
    for (auto c : {Criterion::kCoherence, Criterion::kCompleteness}) {
      auto it = elo.find(c);
      for (const auto& s : systems) {
        if (it == elo.end() || !it->second.count(s)) {
          row.push_back("N.A");
        } else {
          row.push_back(fixed(it->second.at(s), 1));
        }
      }
    }
    t.add_row(std::move(row));
  };
  add("ALL", analysis.elo);
  for (const auto& s : analysis.languages) {
    add(display_lang(s.lang), analysis.elo_by_lang.at(s.lang));
  }
  return t.render();
}

std::string annotation_jsonl(const AnnotationAnalysis& analysis) {
  std::string out;
  auto crit_json = [](const CriterionStats& s) {
    nlohmann::ordered_json j;
    j["alpha"] = s.alpha ? json(*s.alpha) : json(nullptr);
    j["score"] = mean_std_json(s.score);
    j["gap"] = s.gap ? mean_std_json(*s.gap) : json(nullptr);
    return j;
  };
  auto elo_json = [](const std::map<Criterion, EloRatings>& elo) {
    nlohmann::ordered_json j = nlohmann::ordered_json::object();
    for (const auto& [c, ratings] : elo) {
      nlohmann::ordered_json r = nlohmann::ordered_json::object();
      for (const auto& [sys, v] : ratings) r[sys] = v;
      j[std::string(to_string(c))] = r;
    }
    return j;
  };
  for (const auto& s : analysis.languages) {
    nlohmann::ordered_json j;
    j["lang"] = s.lang;
    j["family"] = std::string(to_string(s.family));
    j["resource"] = std::string(to_string(s.resource));
    j["coherence"] = crit_json(s.coherence);
    j["completeness"] = crit_json(s.completeness);
    j["annotations"] = s.annotations;
    j["elo"] = elo_json(analysis.elo_by_lang.at(s.lang));
    out += j.dump() + "\n";
  }
  nlohmann::ordered_json all;
  all["lang"] = "all";
  all["elo"] = elo_json(analysis.elo);
  out += all.dump() + "\n";
  return out;
}

}  // namespace mlsumeval
