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

#ifndef MLSUMEVAL_REPORT_HPP_
#define MLSUMEVAL_REPORT_HPP_

#include <cstddef>
#include <string>
#include <vector>

namespace mlsumeval {

/// Fixed-point rendering with `precision` decimals; "-0.00" is printed as
/// "0.00" so tables do not depend on the sign of rounding noise.
std::string fixed(double value, int precision = 2);

/// Plain-text table with space-padded columns. The first column is left
/// aligned, the rest right aligned.
class TextTable {
 public:
  explicit TextTable(std::vector<std::string> header);

  /// Throws ValidationError when the row width differs from the header.
  void add_row(std::vector<std::string> row);
  std::size_t rows() const { return rows_.size(); }

  std::string render() const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

/// Display width in code points (adequate for the tables' contents).
std::size_t display_width(const std::string& s);

}  // namespace mlsumeval

#endif  // MLSUMEVAL_REPORT_HPP_
