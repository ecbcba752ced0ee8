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

#ifndef MLSUMEVAL_AGREEMENT_HPP_
#define MLSUMEVAL_AGREEMENT_HPP_

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mlsumeval/corpus.hpp"
#include "mlsumeval/error.hpp"

namespace mlsumeval {

/// Ratings per unit: unit id -> (rater id, value). Interval scale.
struct AgreementInput {
  std::map<std::string, std::vector<std::pair<std::string, double>>> units;
};

/// Units are (item, system) cells of one criterion; values are the
/// workers' Likert scores.
AgreementInput agreement_input(const AnnotationSet& annotations,
                               Criterion criterion);

/// Krippendorff's alpha with the interval metric (v - v')^2:
/// alpha = 1 - D_o / D_e over pairable units (two or more values).
/// Returns 1 when every pairable value is identical (D_e = 0). Throws
/// ValidationError when no unit is pairable.
double krippendorff_alpha(const AgreementInput& input);

struct EloConfig {
  double initial = 1000.0;
  double k_factor = 32.0;
  /// 0: one pass in corpus order. Otherwise final ratings are averaged
  /// over this many seeded random orderings.
  std::size_t shuffle_rounds = 0;
  std::uint64_t seed = 0;
};

/// One pairwise outcome; score_a is 1 (a preferred), 0.5 (tie) or 0.
struct EloComparison {
  std::string system_a;
  std::string system_b;
  double score_a = 0.5;
};

using EloRatings = std::map<std::string, double>;

/// Each worker who scored two systems on the same item under `criterion`
/// yields one comparison, higher score preferred. Order: items and workers
/// by first appearance in the annotation file, system pairs by first
/// appearance within the item.
std::vector<EloComparison> pairwise_comparisons(const AnnotationSet& annotations,
                                                Criterion criterion);

/// Standard Elo: E_a = 1 / (1 + 10^((R_b - R_a) / 400)),
/// R_a += K (S_a - E_a), R_b -= K (S_a - E_a). Throws ValidationError when
/// there are no comparisons.
EloRatings elo_ratings(const std::vector<EloComparison>& comparisons,
                       const EloConfig& config = {});

EloRatings elo_rank(const AnnotationSet& annotations, Criterion criterion,
                    const EloConfig& config = {});

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;  // population
  std::size_t n = 0;
};

MeanStd mean_std(const std::vector<double>& values);

/// Mean absolute gap between two systems' per-item mean scores. The pair
/// defaults to the two smallest system ids; with more than two systems a
/// warning is recorded. Throws ValidationError when no item has both.
MeanStd score_gap(const AnnotationSet& annotations, Criterion criterion,
                  std::optional<std::pair<std::string, std::string>> systems = {},
                  Diagnostics* diag = nullptr);

/// Mean and std of all raw scores of a criterion.
MeanStd score_summary(const AnnotationSet& annotations, Criterion criterion);

}  // namespace mlsumeval

#endif  // MLSUMEVAL_AGREEMENT_HPP_
