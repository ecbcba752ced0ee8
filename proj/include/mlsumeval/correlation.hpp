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

#ifndef MLSUMEVAL_CORRELATION_HPP_
#define MLSUMEVAL_CORRELATION_HPP_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mlsumeval {

enum class CorrelationMethod { kPearson, kSpearman };

std::string_view to_string(CorrelationMethod m);
std::optional<CorrelationMethod> parse_method(std::string_view s);

/// A correlation coefficient with its two-sided p-value.
struct CorrelationReport {
  CorrelationMethod method = CorrelationMethod::kPearson;
  double r = 0.0;
  double p_value = 1.0;
  std::size_t n = 0;
  std::string group;
  bool exact_p = false;  // p from full permutation enumeration
};

/// "**" for p < 0.01, "*" for p < 0.05, "" otherwise.
std::string_view significance_stars(double p_value);

/// Product-moment correlation. Throws ValidationError on length mismatch
/// and DomainError when either side has zero variance.
double pearson_r(std::span<const double> x, std::span<const double> y);

/// Pearson r with the two-sided p-value of t = r sqrt((n-2)/(1-r^2)) under
/// Student's t with n-2 degrees of freedom. Requires n >= 3.
CorrelationReport pearson(std::span<const double> x, std::span<const double> y);

/// Ranks starting at 1; ties share the mean of their positions.
std::vector<double> average_ranks(std::span<const double> values);

/// Largest n for which spearman() enumerates all permutations.
inline constexpr std::size_t kSpearmanExactMaxN = 10;

/// Pearson on average ranks. p is exact (all n! orderings of y's ranks)
/// for n <= kSpearmanExactMaxN, else the t approximation.
CorrelationReport spearman(std::span<const double> x, std::span<const double> y);

/// Exact two-sided permutation p-value of the rank correlation: share of
/// distinct orderings of y_ranks whose |rho| reaches the observed |rho|.
double spearman_exact_p(std::span<const double> x_ranks,
                        std::span<const double> y_ranks);

CorrelationReport correlate(CorrelationMethod method, std::span<const double> x,
                            std::span<const double> y);

/// Samples needed to detect correlation rho at two-sided level alpha with
/// the given power (Fisher z):
///   n = ceil(((z_{1-alpha/2} + z_power) / atanh(rho))^2 + 3).
/// Throws DomainError unless 0 < rho, alpha, power < 1.
std::size_t power_sample_size(double rho, double alpha = 0.05,
                              double power = 0.8);

}  // namespace mlsumeval

#endif  // MLSUMEVAL_CORRELATION_HPP_
