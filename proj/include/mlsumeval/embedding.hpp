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

#ifndef MLSUMEVAL_EMBEDDING_HPP_
#define MLSUMEVAL_EMBEDDING_HPP_

#include <cstddef>
#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "mlsumeval/error.hpp"
#include "mlsumeval/ngram.hpp"

namespace mlsumeval {

/// Tokens with one embedding row per token.
struct EmbeddedText {
  std::vector<std::string> tokens;
  Eigen::MatrixXd vectors;  // tokens.size() x dim

  Eigen::Index dim() const { return vectors.cols(); }
  std::size_t size() const { return tokens.size(); }
};

/// Throws ValidationError unless rows == tokens, dim >= 1 and every entry
/// is finite. `what` prefixes the message.
void validate(const EmbeddedText& text, const std::string& what = "embedded text");

/// Smoothed inverse document frequency ln((N + 1) / (df + 1)).
struct IdfWeights {
  std::unordered_map<std::string, double> weights;
  std::size_t n_docs = 0;

  /// Weight of a token; tokens never seen get ln(N + 1).
  double weight(const std::string& token) const;
};

/// Document frequencies count each token at most once per document.
IdfWeights compute_idf(const std::vector<std::vector<std::string>>& documents);

/// Greedy cosine matching: recall averages, over reference tokens, the best
/// cosine with any candidate token (IDF-weighted when given); precision is
/// the mirror image over candidate tokens. No baseline rescaling.
MetricScore bertscore(const EmbeddedText& candidate,
                      const EmbeddedText& reference,
                      const IdfWeights* idf = nullptr);

/// Pairwise Euclidean distances between the rows of x and y.
Eigen::MatrixXd euclidean_cost(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y);

struct MoverScoreResult {
  double score = 0.0;  // -WMD, 0 for identical inputs
  bool exact = true;   // exact solver (false: Sinkhorn)
  bool converged = true;
  std::size_t iterations = 0;
};

/// Word mover's distance over unigram embeddings with uniform or IDF
/// masses, reported as -WMD. Uses the exact solver up to
/// kExactTransportMaxCells cells and Sinkhorn (eps = 0.01 * mean cost,
/// tol 1e-9, 1000 iterations) beyond.
MoverScoreResult moverscore_detail(const EmbeddedText& candidate,
                                   const EmbeddedText& reference,
                                   const IdfWeights* idf = nullptr);

/// Score only. Sinkhorn non-convergence is reported through `diag`.
double moverscore(const EmbeddedText& candidate, const EmbeddedText& reference,
                  const IdfWeights* idf = nullptr, Diagnostics* diag = nullptr);

/// Embeddings loaded from the line-delimited embedding file. Candidate
/// entries are keyed by (item, system); a line without "system" is stored
/// under the empty system and matches any system on lookup.
class EmbeddingStore {
 public:
  const EmbeddedText* candidate(const std::string& item,
                                const std::string& system = {}) const;
  const EmbeddedText* reference(const std::string& item) const;

  void add_candidate(const std::string& item, const std::string& system,
                     EmbeddedText text);
  void add_reference(const std::string& item, EmbeddedText text);

  bool has_candidate(const std::string& item) const;
  /// Items having both a candidate and a reference entry.
  std::vector<std::string> items() const;
  std::size_t candidate_count() const { return candidates_.size(); }
  std::size_t reference_count() const { return references_.size(); }
  Eigen::Index dim() const { return dim_; }
  /// Rows whose vector is exactly zero (accepted, counted).
  std::size_t zero_rows() const { return zero_rows_; }

 private:
  void check_dim(const EmbeddedText& t, const std::string& item);

  std::map<std::pair<std::string, std::string>, EmbeddedText> candidates_;
  std::map<std::string, EmbeddedText> references_;
  Eigen::Index dim_ = 0;
  std::size_t zero_rows_ = 0;
};

/// Parses the embedding file. Fails closed: malformed or truncated lines,
/// row/token mismatches, inconsistent dimensions and items missing one side
/// all throw. Zero-vector rows produce one warning with their count.
EmbeddingStore parse_embeddings(std::istream& in, Diagnostics* diag = nullptr);
EmbeddingStore load_embeddings(const std::filesystem::path& path,
                               Diagnostics* diag = nullptr);

std::string serialize_embedding_line(const std::string& item,
                                     const std::string& side,
                                     const std::string& system,
                                     const EmbeddedText& text);

}  // namespace mlsumeval

#endif  // MLSUMEVAL_EMBEDDING_HPP_
