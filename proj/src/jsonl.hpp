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

// Helpers shared by the line-delimited JSON readers. Internal header.

#ifndef MLSUMEVAL_SRC_JSONL_HPP_
#define MLSUMEVAL_SRC_JSONL_HPP_

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <istream>
#include <string>

#include "json.hpp"
#include "mlsumeval/error.hpp"

namespace mlsumeval::detail {

using json = nlohmann::json;

inline std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return in;
}

inline bool is_blank(const std::string& line) {
  return line.find_first_not_of(" \t\r\n") == std::string::npos;
}

/// Calls fn(json, line_number) for each nonblank line.
template <typename Fn>
void for_each_json_line(std::istream& in, Fn&& fn) {
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (is_blank(line)) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(std::string("malformed JSON: ") + e.what(), lineno);
    }
    if (!j.is_object()) throw ParseError("expected a JSON object", lineno);
    fn(j, lineno);
  }
}

inline const json& require(const json& j, const char* key, std::size_t line) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) {
    throw ValidationError("line " + std::to_string(line) +
                          ": missing required field \"" + key + "\"");
  }
  return *it;
}

inline std::string require_string(const json& j, const char* key,
                                  std::size_t line) {
  const json& v = require(j, key, line);
  if (!v.is_string()) {
    throw ValidationError("line " + std::to_string(line) + ": field \"" + key +
                          "\" must be a string");
  }
  return v.get<std::string>();
}

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n\f\v");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n\f\v");
  return s.substr(b, e - b + 1);
}

}  // namespace mlsumeval::detail

#endif  // MLSUMEVAL_SRC_JSONL_HPP_
