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

#include "mlsumeval/correlation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mlsumeval/error.hpp"
#include "mlsumeval/special.hpp"

namespace mlsumeval {

std::string_view to_string(CorrelationMethod m) {
  return m == CorrelationMethod::kPearson ? "pearson" : "spearman";
}

std::optional<CorrelationMethod> parse_method(std::string_view s) {
  if (s == "pearson") return CorrelationMethod::kPearson;
  if (s == "spearman") return CorrelationMethod::kSpearman;
  return std::nullopt;
}

std::string_view significance_stars(double p_value) {
  if (p_value < 0.01) return "**";
  if (p_value < 0.05) return "*";
  return "";
}

double pearson_r(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw ValidationError("correlation inputs differ in length (" +
                          std::to_string(x.size()) + " vs " +
                          std::to_string(y.size()) + ")");
  }
  const double n = static_cast<double>(x.size());
  if (x.empty()) throw DomainError("correlation of empty samples");
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (sxx == 0.0 || syy == 0.0) {
    throw DomainError("correlation undefined: zero variance");
  }
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

namespace {

double t_test_p(double r, std::size_t n) {
  if (std::fabs(r) >= 1.0) return 0.0;
  const double df = static_cast<double>(n) - 2.0;
  const double t = r * std::sqrt(df / (1.0 - r * r));
  return special::student_t_two_sided(t, df);
}

void require_n(std::size_t n) {
  if (n < 3) {
    throw DomainError("correlation p-value needs at least 3 samples, got " +
                      std::to_string(n));
  }
}

}  // namespace

CorrelationReport pearson(std::span<const double> x, std::span<const double> y) {
  CorrelationReport rep;
  rep.method = CorrelationMethod::kPearson;
  rep.r = pearson_r(x, y);
  rep.n = x.size();
  require_n(rep.n);
  rep.p_value = t_test_p(rep.r, rep.n);
  return rep;
}

std::vector<double> average_ranks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
    const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

double spearman_exact_p(std::span<const double> x_ranks,
                        std::span<const double> y_ranks) {
  const std::size_t n = x_ranks.size();
  const double observed = std::fabs(pearson_r(x_ranks, y_ranks));
  // Means and variances do not change under permutation, so |rho| is a
  // monotone function of |sum x*y - n*mx*my|.
  const double mx = std::accumulate(x_ranks.begin(), x_ranks.end(), 0.0) / n;
  const double my = std::accumulate(y_ranks.begin(), y_ranks.end(), 0.0) / n;
  double sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x_ranks[i] - mx) * (x_ranks[i] - mx);
    syy += (y_ranks[i] - my) * (y_ranks[i] - my);
  }
  const double denom = std::sqrt(sxx * syy);
  const double offset = static_cast<double>(n) * mx * my;
  std::vector<double> perm(y_ranks.begin(), y_ranks.end());
  std::sort(perm.begin(), perm.end());
  std::size_t hits = 0, total = 0;
  do {
    double sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) sxy += x_ranks[i] * perm[i];
    if (std::fabs((sxy - offset) / denom) >= observed - 1e-12) ++hits;
    ++total;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return static_cast<double>(hits) / static_cast<double>(total);
}

CorrelationReport spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw ValidationError("correlation inputs differ in length");
  }
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  CorrelationReport rep;
  rep.method = CorrelationMethod::kSpearman;
  rep.r = pearson_r(rx, ry);
  rep.n = x.size();
  require_n(rep.n);
  if (rep.n <= kSpearmanExactMaxN) {
    rep.p_value = spearman_exact_p(rx, ry);
    rep.exact_p = true;
  } else {
    rep.p_value = t_test_p(rep.r, rep.n);
  }
  return rep;
}

CorrelationReport correlate(CorrelationMethod method, std::span<const double> x,
                            std::span<const double> y) {
  return method == CorrelationMethod::kPearson ? pearson(x, y) : spearman(x, y);
}

std::size_t power_sample_size(double rho, double alpha, double power) {
  if (!(rho > 0.0 && rho < 1.0)) throw DomainError("rho must lie in (0, 1)");
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("alpha must lie in (0, 1)");
  if (!(power > 0.0 && power < 1.0)) throw DomainError("power must lie in (0, 1)");
  const double z = special::normal_quantile(1.0 - alpha / 2.0) +
                   special::normal_quantile(power);
  const double c = 0.5 * std::log((1.0 + rho) / (1.0 - rho));
  const double n = (z / c) * (z / c) + 3.0;
  return static_cast<std::size_t>(std::ceil(n));
}

}  // namespace mlsumeval
