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

#include "mlsumeval/embedding.hpp"

#include <cmath>
#include <set>

#include "jsonl.hpp"
#include "mlsumeval/transport.hpp"

namespace mlsumeval {

using detail::json;

void validate(const EmbeddedText& text, const std::string& what) {
  if (text.vectors.rows() != static_cast<Eigen::Index>(text.tokens.size())) {
    throw ValidationError(what + ": " + std::to_string(text.tokens.size()) +
                          " tokens but " + std::to_string(text.vectors.rows()) +
                          " vectors");
  }
  if (text.dim() < 1) throw ValidationError(what + ": embedding dimension is 0");
  if (!text.vectors.allFinite()) {
    throw ValidationError(what + ": non-finite embedding value");
  }
}

double IdfWeights::weight(const std::string& token) const {
  auto it = weights.find(token);
  if (it != weights.end()) return it->second;
  return std::log(static_cast<double>(n_docs) + 1.0);
}

IdfWeights compute_idf(const std::vector<std::vector<std::string>>& documents) {
  std::unordered_map<std::string, std::size_t> df;
  for (const auto& doc : documents) {
    std::set<std::string> seen(doc.begin(), doc.end());
    for (const auto& t : seen) ++df[t];
  }
  IdfWeights idf;
  idf.n_docs = documents.size();
  const double n = static_cast<double>(documents.size());
  for (const auto& [t, count] : df) {
    idf.weights[t] = std::log((n + 1.0) / (static_cast<double>(count) + 1.0));
  }
  return idf;
}

namespace {

void check_pair(const EmbeddedText& candidate, const EmbeddedText& reference) {
  if (candidate.size() == 0) throw ValidationError("candidate has no tokens");
  if (reference.size() == 0) throw ValidationError("reference has no tokens");
  validate(candidate, "candidate");
  validate(reference, "reference");
  if (candidate.dim() != reference.dim()) {
    throw ValidationError("embedding dimension mismatch: " +
                          std::to_string(candidate.dim()) + " vs " +
                          std::to_string(reference.dim()));
  }
}

// Per-token masses; uniform when no IDF is given or all IDF weights vanish.
Eigen::VectorXd token_weights(const EmbeddedText& text, const IdfWeights* idf) {
  Eigen::VectorXd w = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(text.size()));
  if (idf) {
    for (std::size_t i = 0; i < text.size(); ++i) {
      w[static_cast<Eigen::Index>(i)] = idf->weight(text.tokens[i]);
    }
    if (!(w.sum() > 0.0)) w.setOnes();
  }
  return w;
}

Eigen::MatrixXd normalized_rows(const Eigen::MatrixXd& m) {
  Eigen::MatrixXd out = m;
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    const double norm = out.row(i).norm();
    if (norm > 0.0) out.row(i) /= norm;
  }
  return out;
}

}  // namespace

MetricScore bertscore(const EmbeddedText& candidate,
                      const EmbeddedText& reference, const IdfWeights* idf) {
  check_pair(candidate, reference);
  const Eigen::MatrixXd sim =
      normalized_rows(candidate.vectors) * normalized_rows(reference.vectors).transpose();
  const Eigen::VectorXd wc = token_weights(candidate, idf);
  const Eigen::VectorXd wr = token_weights(reference, idf);
  const Eigen::VectorXd best_for_cand = sim.rowwise().maxCoeff();
  const Eigen::VectorXd best_for_ref = sim.colwise().maxCoeff().transpose();
  const double precision = wc.dot(best_for_cand) / wc.sum();
  const double recall = wr.dot(best_for_ref) / wr.sum();
  return MetricScore::from_pr(precision, recall);
}

Eigen::MatrixXd euclidean_cost(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y) {
  Eigen::MatrixXd d(x.rows(), y.rows());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index j = 0; j < y.rows(); ++j) {
      d(i, j) = (x.row(i) - y.row(j)).norm();
    }
  }
  return d;
}

MoverScoreResult moverscore_detail(const EmbeddedText& candidate,
                                   const EmbeddedText& reference,
                                   const IdfWeights* idf) {
  check_pair(candidate, reference);
  Eigen::VectorXd a = token_weights(candidate, idf);
  Eigen::VectorXd b = token_weights(reference, idf);
  a /= a.sum();
  b /= b.sum();
  const Eigen::MatrixXd cost = euclidean_cost(candidate.vectors, reference.vectors);
  MoverScoreResult result;
  const double mean_cost = cost.mean();
  if (mean_cost == 0.0) return result;
  TransportPlan<double> plan;
  if (static_cast<std::size_t>(cost.size()) <= kExactTransportMaxCells) {
    plan = wmd_exact<double>(a, b, cost);
  } else {
    plan = wmd_sinkhorn<double>(a, b, cost, 0.01 * mean_cost, 1000, 1e-9);
    result.exact = false;
  }
  result.converged = plan.converged;
  result.iterations = plan.iterations;
  result.score = plan.cost > 0.0 ? -plan.cost : 0.0;
  return result;
}

double moverscore(const EmbeddedText& candidate, const EmbeddedText& reference,
                  const IdfWeights* idf, Diagnostics* diag) {
  const auto r = moverscore_detail(candidate, reference, idf);
  if (!r.converged && diag) {
    diag->warn("moverscore: Sinkhorn did not converge in " +
               std::to_string(r.iterations) + " iterations");
  }
  return r.score;
}

const EmbeddedText* EmbeddingStore::candidate(const std::string& item,
                                              const std::string& system) const {
  if (!system.empty()) {
    if (auto it = candidates_.find({item, system}); it != candidates_.end()) {
      return &it->second;
    }
  }
  auto it = candidates_.find({item, std::string()});
  return it == candidates_.end() ? nullptr : &it->second;
}

const EmbeddedText* EmbeddingStore::reference(const std::string& item) const {
  auto it = references_.find(item);
  return it == references_.end() ? nullptr : &it->second;
}

void EmbeddingStore::check_dim(const EmbeddedText& t, const std::string& item) {
  validate(t, "item " + item);
  if (dim_ == 0) dim_ = t.dim();
  if (t.dim() != dim_) {
    throw ValidationError("item " + item + ": dimension " +
                          std::to_string(t.dim()) + " differs from " +
                          std::to_string(dim_));
  }
  for (Eigen::Index i = 0; i < t.vectors.rows(); ++i) {
    if (t.vectors.row(i).isZero(0.0)) ++zero_rows_;
  }
}

void EmbeddingStore::add_candidate(const std::string& item,
                                   const std::string& system, EmbeddedText text) {
  check_dim(text, item);
  if (!candidates_.emplace(std::make_pair(item, system), std::move(text)).second) {
    throw ValidationError("item " + item + ": duplicate candidate embedding");
  }
}

void EmbeddingStore::add_reference(const std::string& item, EmbeddedText text) {
  check_dim(text, item);
  if (!references_.emplace(item, std::move(text)).second) {
    throw ValidationError("item " + item + ": duplicate reference embedding");
  }
}

bool EmbeddingStore::has_candidate(const std::string& item) const {
  auto it = candidates_.lower_bound({item, std::string()});
  return it != candidates_.end() && it->first.first == item;
}

std::vector<std::string> EmbeddingStore::items() const {
  std::vector<std::string> out;
  for (const auto& [item, _] : references_) {
    if (has_candidate(item)) out.push_back(item);
  }
  return out;
}

namespace {

EmbeddedText embedded_from_json(const json& j, const std::string& where) {
  const json* toks = j.contains("tokens") ? &j["tokens"] : nullptr;
  const json* vecs = j.contains("vectors") ? &j["vectors"] : nullptr;
  if (!toks || !toks->is_array() || !vecs || !vecs->is_array()) {
    throw SchemaError(where + ": \"tokens\" and \"vectors\" must be arrays");
  }
  EmbeddedText t;
  for (const auto& tok : *toks) {
    if (!tok.is_string()) throw SchemaError(where + ": token must be a string");
    t.tokens.push_back(tok.get<std::string>());
  }
  if (vecs->size() != t.tokens.size()) {
    throw ValidationError(where + ": " + std::to_string(t.tokens.size()) +
                          " tokens but " + std::to_string(vecs->size()) +
                          " vectors");
  }
  const std::size_t d = vecs->empty() ? 0 : (*vecs)[0].size();
  t.vectors.resize(static_cast<Eigen::Index>(vecs->size()),
                   static_cast<Eigen::Index>(d));
  for (std::size_t i = 0; i < vecs->size(); ++i) {
    const json& row = (*vecs)[i];
    if (!row.is_array() || row.size() != d) {
      throw ValidationError(where + ": vector " + std::to_string(i) +
                            " has inconsistent length");
    }
    for (std::size_t k = 0; k < d; ++k) {
      if (!row[k].is_number()) {
        throw SchemaError(where + ": vector entries must be numbers");
      }
      t.vectors(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) =
          row[k].get<double>();
    }
  }
  return t;
}

}  // namespace

EmbeddingStore parse_embeddings(std::istream& in, Diagnostics* diag) {
  EmbeddingStore store;
  std::set<std::string> seen_items;
  detail::for_each_json_line(in, [&](const json& j, std::size_t line) {
    const std::string item = detail::require_string(j, "item_id", line);
    const std::string side = detail::require_string(j, "side", line);
    std::string system;
    if (auto it = j.find("system"); it != j.end() && it->is_string()) {
      system = it->get<std::string>();
    }
    const std::string where = "line " + std::to_string(line) + ", item " + item;
    EmbeddedText t;
    try {
      t = embedded_from_json(j, where);
    } catch (const SchemaError& e) {
      throw ValidationError(e.what());
    }
    if (t.tokens.empty()) throw ValidationError(where + ": no tokens");
    if (side == "candidate") {
      store.add_candidate(item, system, std::move(t));
    } else if (side == "reference") {
      store.add_reference(item, std::move(t));
    } else {
      throw ValidationError(where + ": unknown side \"" + side + "\"");
    }
    seen_items.insert(item);
  });
  for (const auto& item : seen_items) {
    const bool has_ref = store.reference(item) != nullptr;
    const bool has_cand = store.has_candidate(item);
    if (!has_ref || !has_cand) {
      throw ValidationError("item " + item + ": embedding file lacks the " +
                            std::string(has_ref ? "candidate" : "reference") +
                            " side (truncated file?)");
    }
  }
  if (store.zero_rows() > 0 && diag) {
    diag->warn("embeddings: " + std::to_string(store.zero_rows()) +
               " zero-vector row(s)");
  }
  return store;
}

EmbeddingStore load_embeddings(const std::filesystem::path& path,
                               Diagnostics* diag) {
  auto in = detail::open_input(path);
  return parse_embeddings(in, diag);
}

std::string serialize_embedding_line(const std::string& item,
                                     const std::string& side,
                                     const std::string& system,
                                     const EmbeddedText& text) {
  nlohmann::ordered_json j;
  j["item_id"] = item;
  j["side"] = side;
  if (!system.empty()) j["system"] = system;
  j["tokens"] = text.tokens;
  j["vectors"] = nlohmann::ordered_json::array();
  for (Eigen::Index i = 0; i < text.vectors.rows(); ++i) {
    auto row = nlohmann::ordered_json::array();
    for (Eigen::Index k = 0; k < text.vectors.cols(); ++k) {
      row.push_back(text.vectors(i, k));
    }
    j["vectors"].push_back(std::move(row));
  }
  return j.dump();
}

}  // namespace mlsumeval
