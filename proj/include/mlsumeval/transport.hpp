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

#ifndef MLSUMEVAL_TRANSPORT_HPP_
#define MLSUMEVAL_TRANSPORT_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "mlsumeval/error.hpp"

namespace mlsumeval {

template <typename Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// Coupling between two discrete distributions and its transport cost.
template <typename Scalar>
struct TransportPlan {
  Mat<Scalar> plan;          // n x m, nonnegative
  Vec<Scalar> row_marginals;  // a
  Vec<Scalar> col_marginals;  // b
  Scalar cost = 0;            // <plan, cost matrix>
  /// L1 deviation of the plan's marginals from (a, b).
  Scalar marginal_error = 0;
  bool converged = true;
  std::size_t iterations = 0;
};

/// Largest n*m handled by the exact solver.
inline constexpr std::size_t kExactTransportMaxCells = 4096;

namespace transport_detail {

template <typename Scalar>
void check_simplex(const Eigen::Ref<const Vec<Scalar>>& w, const char* name,
                   Scalar tol) {
  if (w.size() == 0) throw ValidationError(std::string(name) + " is empty");
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    if (!std::isfinite(static_cast<double>(w[i])) || w[i] < -tol) {
      throw ValidationError(std::string(name) +
                            " has a negative or non-finite weight");
    }
  }
  if (std::abs(w.sum() - Scalar(1)) > tol) {
    throw ValidationError(std::string(name) + " does not sum to 1 (sum = " +
                          std::to_string(static_cast<double>(w.sum())) + ")");
  }
}

template <typename Scalar>
void check_problem(const Eigen::Ref<const Vec<Scalar>>& a,
                   const Eigen::Ref<const Vec<Scalar>>& b,
                   const Eigen::Ref<const Mat<Scalar>>& cost, Scalar tol) {
  check_simplex<Scalar>(a, "row weights", tol);
  check_simplex<Scalar>(b, "column weights", tol);
  if (cost.rows() != a.size() || cost.cols() != b.size()) {
    throw ValidationError("cost matrix is " + std::to_string(cost.rows()) +
                          "x" + std::to_string(cost.cols()) +
                          ", weights are " + std::to_string(a.size()) + " and " +
                          std::to_string(b.size()));
  }
  for (Eigen::Index i = 0; i < cost.size(); ++i) {
    const Scalar c = cost.data()[i];
    if (!std::isfinite(static_cast<double>(c)) || c < 0) {
      throw ValidationError("cost matrix must be finite and nonnegative");
    }
  }
}

template <typename Scalar>
void finish(TransportPlan<Scalar>& tp, const Eigen::Ref<const Mat<Scalar>>& cost) {
  tp.cost = (tp.plan.array() * cost.array()).sum();
  tp.marginal_error =
      (tp.plan.rowwise().sum() - tp.row_marginals).cwiseAbs().sum() +
      (tp.plan.colwise().sum().transpose() - tp.col_marginals).cwiseAbs().sum();
}

// Spanning-tree basis of the transportation problem. Nodes 0..n-1 are rows,
// n..n+m-1 are columns.
class TreeBasis {
 public:
  TreeBasis(std::size_t n, std::size_t m) : n_(n), m_(m), adj_(n + m) {}

  void add(std::size_t i, std::size_t j) {
    adj_[i].push_back(n_ + j);
    adj_[n_ + j].push_back(i);
  }
  void remove(std::size_t i, std::size_t j) {
    auto erase = [](std::vector<std::size_t>& v, std::size_t x) {
      v.erase(std::find(v.begin(), v.end(), x));
    };
    erase(adj_[i], n_ + j);
    erase(adj_[n_ + j], i);
  }

  // Node path from `from` to `to` (inclusive) through the tree.
  std::vector<std::size_t> path(std::size_t from, std::size_t to) const {
    std::vector<std::size_t> parent(n_ + m_, kNone);
    std::vector<std::size_t> queue{from};
    parent[from] = from;
    for (std::size_t q = 0; q < queue.size() && parent[to] == kNone; ++q) {
      for (std::size_t next : adj_[queue[q]]) {
        if (parent[next] == kNone) {
          parent[next] = queue[q];
          queue.push_back(next);
        }
      }
    }
    std::vector<std::size_t> out;
    for (std::size_t v = to; v != from; v = parent[v]) out.push_back(v);
    out.push_back(from);
    std::reverse(out.begin(), out.end());
    return out;
  }

  // Potentials with u_0 = 0 and u_i + v_j = c_ij on tree edges.
  template <typename Scalar>
  void potentials(const Eigen::Ref<const Mat<Scalar>>& cost, Vec<Scalar>& u,
                  Vec<Scalar>& v) const {
    std::vector<Scalar> pot(n_ + m_, 0);
    std::vector<bool> seen(n_ + m_, false);
    std::vector<std::size_t> queue{0};
    seen[0] = true;
    for (std::size_t q = 0; q < queue.size(); ++q) {
      const std::size_t x = queue[q];
      for (std::size_t y : adj_[x]) {
        if (seen[y]) continue;
        seen[y] = true;
        const bool x_row = x < n_;
        const auto i = static_cast<Eigen::Index>(x_row ? x : y);
        const auto j = static_cast<Eigen::Index>((x_row ? y : x) - n_);
        pot[y] = cost(i, j) - pot[x];
        queue.push_back(y);
      }
    }
    u.resize(static_cast<Eigen::Index>(n_));
    v.resize(static_cast<Eigen::Index>(m_));
    for (std::size_t i = 0; i < n_; ++i) u[static_cast<Eigen::Index>(i)] = pot[i];
    for (std::size_t j = 0; j < m_; ++j) v[static_cast<Eigen::Index>(j)] = pot[n_ + j];
  }

 private:
  static constexpr std::size_t kNone = static_cast<std::size_t>(-1);
  std::size_t n_, m_;
  std::vector<std::vector<std::size_t>> adj_;
};

}  // namespace transport_detail

/// Minimum-cost transport plan by the transportation simplex method
/// (northwest-corner start, MODI potentials, Bland's rule after degenerate
/// pivots). Requires a and b on the simplex within 1e-9, a finite
/// nonnegative cost, and n*m <= kExactTransportMaxCells; larger problems
/// throw ValidationError pointing to wmd_sinkhorn.
template <typename Scalar>
TransportPlan<Scalar> wmd_exact(const Eigen::Ref<const Vec<Scalar>>& a,
                                const Eigen::Ref<const Vec<Scalar>>& b,
                                const Eigen::Ref<const Mat<Scalar>>& cost) {
  const auto n = static_cast<std::size_t>(a.size());
  const auto m = static_cast<std::size_t>(b.size());
  if (n * m > kExactTransportMaxCells) {
    throw ValidationError("transport problem of " + std::to_string(n) + "x" +
                          std::to_string(m) +
                          " exceeds the exact solver limit of " +
                          std::to_string(kExactTransportMaxCells) +
                          " cells; use wmd_sinkhorn");
  }
  transport_detail::check_problem<Scalar>(a, b, cost, Scalar(1e-9));

  TransportPlan<Scalar> tp;
  tp.row_marginals = a;
  tp.col_marginals = b;
  tp.plan = Mat<Scalar>::Zero(a.size(), b.size());
  Mat<Scalar>& x = tp.plan;
  // basic(i, j) marks the n + m - 1 cells of the current basis.
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> basic =
      Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>::Constant(
          a.size(), b.size(), false);
  transport_detail::TreeBasis tree(n, m);

  {
    Vec<Scalar> supply = a.cwiseMax(Scalar(0));
    Vec<Scalar> demand = b.cwiseMax(Scalar(0));
    std::size_t i = 0, j = 0;
    for (;;) {
      const auto ii = static_cast<Eigen::Index>(i);
      const auto jj = static_cast<Eigen::Index>(j);
      const Scalar q = std::min(supply[ii], demand[jj]);
      x(ii, jj) = q;
      supply[ii] -= q;
      demand[jj] -= q;
      basic(ii, jj) = true;
      tree.add(i, j);
      if (i == n - 1 && j == m - 1) break;
      if (j == m - 1 || (i < n - 1 && supply[ii] <= demand[jj])) {
        ++i;
      } else {
        ++j;
      }
    }
  }

  const Scalar scale = std::max(Scalar(1), cost.cwiseAbs().maxCoeff());
  const Scalar tol = Scalar(64) * std::numeric_limits<Scalar>::epsilon() * scale;
  const std::size_t max_iter = 50 * (n + m) * (n + m) + 1000;
  bool bland = false;
  Vec<Scalar> u, v;
  std::size_t iter = 0;
  for (;; ++iter) {
    if (iter >= max_iter) {
      throw Error("transportation simplex did not terminate");
    }
    tree.potentials<Scalar>(cost, u, v);
    // Entering cell: most negative reduced cost, or the first negative one
    // under Bland's rule.
    Eigen::Index ei = -1, ej = -1;
    Scalar best = -tol;
    for (Eigen::Index i = 0; i < a.size() && !(bland && ei >= 0); ++i) {
      for (Eigen::Index j = 0; j < b.size(); ++j) {
        if (basic(i, j)) continue;
        const Scalar r = cost(i, j) - u[i] - v[j];
        if (r < best) {
          best = bland ? -tol : r;
          ei = i;
          ej = j;
          if (bland) break;
        }
      }
    }
    if (ei < 0) break;

    // Cycle: entering cell, then the tree path from column ej back to row ei.
    const auto nodes = tree.path(n + static_cast<std::size_t>(ej),
                                 static_cast<std::size_t>(ei));
    std::vector<std::pair<Eigen::Index, Eigen::Index>> minus, plus;
    for (std::size_t k = 0; k + 1 < nodes.size(); ++k) {
      const std::size_t p = nodes[k], q = nodes[k + 1];
      const bool p_row = p < n;
      const auto cell = std::make_pair(
          static_cast<Eigen::Index>(p_row ? p : q),
          static_cast<Eigen::Index>((p_row ? q : p) - n));
      (k % 2 == 0 ? minus : plus).push_back(cell);
    }
    Scalar theta = std::numeric_limits<Scalar>::infinity();
    std::pair<Eigen::Index, Eigen::Index> leaving{-1, -1};
    for (const auto& [i, j] : minus) {
      const Scalar f = x(i, j);
      const bool better = f < theta ||
                          (f == theta && i * b.size() + j <
                                             leaving.first * b.size() +
                                                 leaving.second);
      if (better) {
        theta = f;
        leaving = {i, j};
      }
    }
    theta = std::max(theta, Scalar(0));
    x(ei, ej) += theta;
    for (const auto& [i, j] : minus) x(i, j) = std::max(Scalar(0), x(i, j) - theta);
    for (const auto& [i, j] : plus) x(i, j) += theta;
    x(leaving.first, leaving.second) = 0;
    basic(leaving.first, leaving.second) = false;
    tree.remove(static_cast<std::size_t>(leaving.first),
                static_cast<std::size_t>(leaving.second));
    basic(ei, ej) = true;
    tree.add(static_cast<std::size_t>(ei), static_cast<std::size_t>(ej));
    bland = theta <= std::numeric_limits<Scalar>::epsilon();
  }
  tp.iterations = iter;
  transport_detail::finish<Scalar>(tp, cost);
  return tp;
}

/// Entropic transport by log-domain Sinkhorn iterations on
/// K = exp(-cost / epsilon). Stops when the L1 marginal error drops below
/// tol or after max_iter iterations; `converged` reports which.
template <typename Scalar>
TransportPlan<Scalar> wmd_sinkhorn(const Eigen::Ref<const Vec<Scalar>>& a,
                                   const Eigen::Ref<const Vec<Scalar>>& b,
                                   const Eigen::Ref<const Mat<Scalar>>& cost,
                                   Scalar epsilon, std::size_t max_iter = 1000,
                                   Scalar tol = Scalar(1e-9)) {
  if (!(epsilon > 0)) throw DomainError("Sinkhorn epsilon must be positive");
  transport_detail::check_problem<Scalar>(a, b, cost, Scalar(1e-9));
  const Eigen::Index n = a.size(), m = b.size();
  const Scalar neg_inf = -std::numeric_limits<Scalar>::infinity();
  Vec<Scalar> log_a(n), log_b(m);
  for (Eigen::Index i = 0; i < n; ++i) log_a[i] = a[i] > 0 ? std::log(a[i]) : neg_inf;
  for (Eigen::Index j = 0; j < m; ++j) log_b[j] = b[j] > 0 ? std::log(b[j]) : neg_inf;
  const Mat<Scalar> scaled = -cost / epsilon;  // log K
  Vec<Scalar> f = Vec<Scalar>::Zero(n), g = Vec<Scalar>::Zero(m);  // in units of epsilon

  auto lse = [neg_inf](auto&& values) {
    Scalar mx = neg_inf;
    for (Eigen::Index k = 0; k < values.size(); ++k) mx = std::max(mx, Scalar(values[k]));
    if (mx == neg_inf) return neg_inf;
    Scalar s = 0;
    for (Eigen::Index k = 0; k < values.size(); ++k) s += std::exp(values[k] - mx);
    return mx + std::log(s);
  };

  TransportPlan<Scalar> tp;
  tp.row_marginals = a;
  tp.col_marginals = b;
  tp.converged = false;
  Vec<Scalar> work_m(m), work_n(n);
  std::size_t iter = 0;
  Scalar err = std::numeric_limits<Scalar>::infinity();
  while (iter < max_iter) {
    ++iter;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (log_a[i] == neg_inf) {
        f[i] = neg_inf;
        continue;
      }
      for (Eigen::Index j = 0; j < m; ++j) work_m[j] = scaled(i, j) + g[j];
      f[i] = log_a[i] - lse(work_m);
    }
    for (Eigen::Index j = 0; j < m; ++j) {
      if (log_b[j] == neg_inf) {
        g[j] = neg_inf;
        continue;
      }
      for (Eigen::Index i = 0; i < n; ++i) work_n[i] = scaled(i, j) + f[i];
      g[j] = log_b[j] - lse(work_n);
    }
    // Columns are exact after the g update; measure the row error.
    err = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < m; ++j) work_m[j] = scaled(i, j) + g[j];
      const Scalar row = f[i] == neg_inf ? Scalar(0) : std::exp(f[i] + lse(work_m));
      err += std::abs(row - a[i]);
    }
    if (err < tol) {
      tp.converged = true;
      break;
    }
  }
  tp.plan.resize(n, m);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      const Scalar e = f[i] + g[j] + scaled(i, j);
      tp.plan(i, j) = (f[i] == neg_inf || g[j] == neg_inf) ? Scalar(0) : std::exp(e);
    }
  }
  tp.iterations = iter;
  transport_detail::finish<Scalar>(tp, cost);
  return tp;
}

}  // namespace mlsumeval

#endif  // MLSUMEVAL_TRANSPORT_HPP_
