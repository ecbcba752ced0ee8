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

#include "mlsumeval/language.hpp"

#include <algorithm>
#include <array>
#include <cctype>

#include "mlsumeval/error.hpp"

namespace mlsumeval {
namespace {

const std::array<LanguageProfile, 9> kLanguages = {{
    {"en", "English", 92.64, Family::kLowFusional, Resource::kHigh},
    {"es", "Spanish", 0.77289, Family::kLowFusional, Resource::kHigh},
    {"ja", "Japanese", 0.11109, Family::kAgglutinative, Resource::kHigh},
    {"zh", "Chinese", 0.09905, Family::kIsolating, Resource::kHigh},
    {"tr", "Turkish", 0.05944, Family::kAgglutinative, Resource::kLow},
    {"ar", "Arabic", 0.03114, Family::kHighFusional, Resource::kHigh},
    {"he", "Hebrew", 0.00769, Family::kHighFusional, Resource::kLow},
    {"uk", "Ukrainian", 0.00763, Family::kLowFusional, Resource::kLow},
    {"yo", "Yoruba", 0.00000, Family::kIsolating, Resource::kLow},
}};

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return out;
}

}  // namespace

Resource classify_resource(double token_pct) {
  if (!(token_pct >= 0.0)) {
    throw DomainError("token percentage must be nonnegative");
  }
  return token_pct >= 0.1 ? Resource::kHigh : Resource::kLow;
}

std::span<const LanguageProfile> builtin_languages() {
  return kLanguages;
}

std::string canonical_lang(std::string_view code) {
  std::string c = lower(code);
  if (c == "jp") return "ja";
  if (c == "yor") return "yo";
  if (c == "ukr") return "uk";
  return c;
}

std::optional<LanguageProfile> find_language(std::string_view code) {
  const std::string c = canonical_lang(code);
  for (const auto& p : kLanguages) {
    if (p.lang == c) return p;
  }
  return std::nullopt;
}

std::string_view to_string(Family f) {
  switch (f) {
    case Family::kIsolating: return "Isolating";
    case Family::kAgglutinative: return "Agglutinative";
    case Family::kLowFusional: return "LowFusional";
    case Family::kHighFusional: return "HighFusional";
  }
  return "";
}

std::string_view to_string(Resource r) {
  return r == Resource::kHigh ? "High" : "Low";
}

std::optional<Family> parse_family(std::string_view s) {
  const std::string l = lower(s);
  if (l == "isolating") return Family::kIsolating;
  if (l == "agglutinative") return Family::kAgglutinative;
  if (l == "lowfusional" || l == "low_fusional" || l == "low-fusional")
    return Family::kLowFusional;
  if (l == "highfusional" || l == "high_fusional" || l == "high-fusional")
    return Family::kHighFusional;
  return std::nullopt;
}

std::optional<Resource> parse_resource(std::string_view s) {
  const std::string l = lower(s);
  if (l == "high") return Resource::kHigh;
  if (l == "low") return Resource::kLow;
  return std::nullopt;
}

}  // namespace mlsumeval
