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

#include "mlsumeval/agreement.hpp"

#include <cmath>
#include <set>
#include <unordered_map>

#include "mlsumeval/error.hpp"
#include "mlsumeval/rng.hpp"

namespace mlsumeval {

AgreementInput agreement_input(const AnnotationSet& annotations,
                               Criterion criterion) {
  AgreementInput input;
  for (const auto& r : annotations.records()) {
    if (r.criterion != criterion) continue;
    input.units[r.item_id + "\x1f" + r.system_id].emplace_back(r.worker_id,
                                                               r.score);
  }
  return input;
}

double krippendorff_alpha(const AgreementInput& input) {
  // Sum over ordered pairs i != j of (v_i - v_j)^2 is 2 (m S2 - S1^2).
  double n = 0.0;
  double within = 0.0;
  double s1 = 0.0, s2 = 0.0;
  for (const auto& [unit, ratings] : input.units) {
    if (ratings.size() < 2) continue;
    const double m = static_cast<double>(ratings.size());
    double u1 = 0.0, u2 = 0.0;
    for (const auto& [rater, v] : ratings) {
      u1 += v;
      u2 += v * v;
    }
    within += 2.0 * (m * u2 - u1 * u1) / (m - 1.0);
    n += m;
    s1 += u1;
    s2 += u2;
  }
  if (n == 0.0) throw ValidationError("no pairable units for agreement");
  const double d_o = within / n;
  const double d_e = 2.0 * (n * s2 - s1 * s1) / (n * (n - 1.0));
  if (d_e <= 0.0) return 1.0;
  return 1.0 - d_o / d_e;
}

std::vector<EloComparison> pairwise_comparisons(const AnnotationSet& annotations,
                                                Criterion criterion) {
  // Items in order of first appearance, each with its workers in order of
  // first appearance, each worker with the systems they scored.
  using Scores = std::vector<std::pair<std::string, int>>;
  std::vector<std::string> item_order;
  std::unordered_map<std::string, std::vector<std::string>> workers_of;
  std::map<std::pair<std::string, std::string>, Scores> scores;
  for (const auto& r : annotations.records()) {
    if (r.criterion != criterion) continue;
    auto& cell = scores[{r.item_id, r.worker_id}];
    if (cell.empty()) {
      auto [it, inserted] = workers_of.try_emplace(r.item_id);
      if (inserted) item_order.push_back(r.item_id);
      it->second.push_back(r.worker_id);
    }
    cell.emplace_back(r.system_id, r.score);
  }
  std::vector<EloComparison> out;
  for (const auto& item : item_order) {
    for (const auto& worker : workers_of[item]) {
      const Scores& cell = scores[{item, worker}];
      for (std::size_t i = 0; i < cell.size(); ++i) {
        for (std::size_t j = i + 1; j < cell.size(); ++j) {
          const int a = cell[i].second, b = cell[j].second;
          out.push_back({cell[i].first, cell[j].first,
                         a > b ? 1.0 : (a < b ? 0.0 : 0.5)});
        }
      }
    }
  }
  return out;
}

namespace {

void elo_pass(const std::vector<EloComparison>& comparisons,
              const std::vector<std::size_t>& order, const EloConfig& config,
              EloRatings& ratings) {
  for (std::size_t idx : order) {
    const auto& c = comparisons[idx];
    // Evaluate every pair from the side of the lexicographically smaller
    // name, so listing a comparison as (b, a, 1 - s) gives bit-identical
    // ratings.
    const bool flip = c.system_b < c.system_a;
    double& ra = ratings[flip ? c.system_b : c.system_a];
    double& rb = ratings[flip ? c.system_a : c.system_b];
    const double score = flip ? 1.0 - c.score_a : c.score_a;
    const double expected_a = 1.0 / (1.0 + std::pow(10.0, (rb - ra) / 400.0));
    const double delta = config.k_factor * (score - expected_a);
    ra += delta;
    rb -= delta;
  }
}

}  // namespace

EloRatings elo_ratings(const std::vector<EloComparison>& comparisons,
                       const EloConfig& config) {
  if (comparisons.empty()) throw ValidationError("no pairwise comparisons for Elo");
  if (!(config.k_factor > 0.0)) throw DomainError("Elo K factor must be positive");
  EloRatings initial;
  for (const auto& c : comparisons) {
    initial[c.system_a] = config.initial;
    initial[c.system_b] = config.initial;
  }
  std::vector<std::size_t> order(comparisons.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  if (config.shuffle_rounds == 0) {
    EloRatings ratings = initial;
    elo_pass(comparisons, order, config, ratings);
    return ratings;
  }
  EloRatings sum;
  for (const auto& [s, _] : initial) sum[s] = 0.0;
  Rng rng(config.seed);
  for (std::size_t round = 0; round < config.shuffle_rounds; ++round) {
    rng.shuffle(order);
    EloRatings ratings = initial;
    elo_pass(comparisons, order, config, ratings);
    for (const auto& [s, r] : ratings) sum[s] += r;
  }
  for (auto& [s, r] : sum) r /= static_cast<double>(config.shuffle_rounds);
  return sum;
}

EloRatings elo_rank(const AnnotationSet& annotations, Criterion criterion,
                    const EloConfig& config) {
  return elo_ratings(pairwise_comparisons(annotations, criterion), config);
}

MeanStd mean_std(const std::vector<double>& values) {
  MeanStd out;
  out.n = values.size();
  if (values.empty()) return out;
  double sum = 0.0;
  for (double v : values) sum += v;
  out.mean = sum / static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - out.mean) * (v - out.mean);
  out.std = std::sqrt(ss / static_cast<double>(values.size()));
  return out;
}

MeanStd score_gap(const AnnotationSet& annotations, Criterion criterion,
                  std::optional<std::pair<std::string, std::string>> systems,
                  Diagnostics* diag) {
  if (!systems) {
    const auto all = annotations.systems();
    if (all.size() < 2) {
      throw ValidationError("score gap needs two systems, found " +
                            std::to_string(all.size()));
    }
    if (all.size() > 2 && diag) {
      diag->warn("score gap: " + std::to_string(all.size()) +
                 " systems present, using " + all[0] + " and " + all[1]);
    }
    systems = std::make_pair(all[0], all[1]);
  }
  std::vector<std::string> items;
  std::set<std::string> seen;
  for (const auto& r : annotations.records()) {
    if (seen.insert(r.item_id).second) items.push_back(r.item_id);
  }
  std::vector<double> gaps;
  for (const auto& item : items) {
    const auto a = annotations.mean_score(item, systems->first, criterion);
    const auto b = annotations.mean_score(item, systems->second, criterion);
    if (a && b) gaps.push_back(std::fabs(*a - *b));
  }
  if (gaps.empty()) {
    throw ValidationError("no item has scores for both " + systems->first +
                          " and " + systems->second);
  }
  return mean_std(gaps);
}

MeanStd score_summary(const AnnotationSet& annotations, Criterion criterion) {
  std::vector<double> values;
  for (const auto& r : annotations.records()) {
    if (r.criterion == criterion) values.push_back(r.score);
  }
  return mean_std(values);
}

}  // namespace mlsumeval
