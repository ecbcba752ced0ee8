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

#ifndef MLSUMEVAL_LANGUAGE_HPP_
#define MLSUMEVAL_LANGUAGE_HPP_

#include <optional>
#include <span>
#include <string>
#include <string_view>

namespace mlsumeval {

enum class Family { kIsolating, kAgglutinative, kLowFusional, kHighFusional };

// Ordered so that Low < High.
enum class Resource { kLow = 0, kHigh = 1 };

/// Share of pretraining tokens for a language, with its typological family
/// and resource class.
struct LanguageProfile {
  std::string lang;  // canonical ISO 639-1 code
  std::string name;
  double token_pct = 0.0;  // percent, e.g. 0.77289 for 0.77289%
  Family family = Family::kIsolating;
  Resource resource = Resource::kLow;
};

/// High iff token_pct >= 0.1 (percent). Throws DomainError on negative input.
Resource classify_resource(double token_pct);

/// Built-in table of the eight evaluated languages plus English. Resource
/// classes are the published assignments, which override the generic rule
/// for Arabic and Chinese.
std::span<const LanguageProfile> builtin_languages();

/// Lookup by code; accepts the aliases jp, yor and ukr. Case-insensitive.
std::optional<LanguageProfile> find_language(std::string_view code);

/// Canonical code for a known language or alias; unknown codes are returned
/// lowercased.
std::string canonical_lang(std::string_view code);

std::string_view to_string(Family f);
std::string_view to_string(Resource r);
std::optional<Family> parse_family(std::string_view s);
std::optional<Resource> parse_resource(std::string_view s);

}  // namespace mlsumeval

#endif  // MLSUMEVAL_LANGUAGE_HPP_
