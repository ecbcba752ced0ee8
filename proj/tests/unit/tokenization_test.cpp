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

#include <memory>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "mlsumeval/error.hpp"
#include "mlsumeval/tokenize.hpp"
#include "mlsumeval/unicode.hpp"
#include "support/fixtures.hpp"

namespace mlsumeval {
namespace {

using testing::words;
using Strings = std::vector<std::string>;

std::shared_ptr<const SubwordVocab> vocab_of(Strings entries,
                                             bool cased = true) {
  return std::make_shared<const SubwordVocab>(std::move(entries), cased);
}

// Every token's span must cover exactly its text in the prepared input.
void expect_spans_cover(const std::string& raw, const TokenizerSpec& spec) {
  const std::string text = prepare_text(raw, spec);
  std::size_t prev_end = 0;
  for (const auto& t : tokenize(raw, spec)) {
    EXPECT_FALSE(t.text.empty());
    EXPECT_LE(t.begin, t.end);
    EXPECT_GE(t.begin, prev_end);
    prev_end = t.end;
    if (t.text == "[UNK]") continue;  // spans its whole word
    const bool continuation = t.text.rfind("##", 0) == 0;
    EXPECT_EQ(text.substr(t.begin, t.end - t.begin),
              continuation ? t.text.substr(2) : t.text);
  }
}

TEST(Unicode, GraphemesKeepCombiningMarks) {
  // Hebrew letter with a vowel point, Arabic letter with a shadda, and an
  // emoji with a skin tone modifier: one cluster each.
  const std::string s = "שָ" "بّ" "\U0001F44D\U0001F3FD";
  EXPECT_EQ(unicode::grapheme_clusters(s).size(), 3u);
}

TEST(Unicode, NfkcFoldsCompatibilityForms) {
  EXPECT_EQ(unicode::nfkc("ＡＢ"), "AB");        // fullwidth
  EXPECT_EQ(unicode::nfkc("é"), "é");         // composition
  EXPECT_EQ(unicode::nfkc("ﬁ"), "fi");              // ligature
}

TEST(Unicode, LowerAndClasses) {
  EXPECT_EQ(unicode::to_lower("İSTANBUL"), "i\xCC\x87stanbul");
  EXPECT_EQ(unicode::to_lower("ДІМ"), "дім");
  EXPECT_TRUE(unicode::is_punctuation(U'،'));  // Arabic comma
  EXPECT_TRUE(unicode::is_cjk_ideograph(U'中'));
  EXPECT_TRUE(unicode::is_word_char(U'ָ'));    // mark
  EXPECT_TRUE(unicode::is_whitespace(U'　'));
}

TEST(Unicode, InvalidSequencesBecomeReplacement) {
  const auto cps = unicode::code_points(std::string("a\xFF" "b"));
  EXPECT_EQ(cps, (std::vector<char32_t>{U'a', U'�', U'b'}));
}

TEST(Tokenize, WhitespaceExamples) {
  const auto spec = TokenizerSpec::whitespace();
  EXPECT_EQ(token_texts(tokenize("a b  c", spec)), (Strings{"a", "b", "c"}));
  EXPECT_TRUE(tokenize("", spec).empty());
  EXPECT_TRUE(tokenize(" \t\n", spec).empty());
}

TEST(Tokenize, CharacterExamples) {
  const auto spec = TokenizerSpec::character();
  EXPECT_EQ(token_texts(tokenize("ab", spec)), (Strings{"a", "b"}));
  EXPECT_EQ(token_texts(tokenize("a b", spec)), (Strings{"a", "b"}));
  EXPECT_TRUE(tokenize("", spec).empty());
  EXPECT_EQ(tokenize("שָל", spec).size(), 2u);
}

TEST(Tokenize, EmptyUnderEveryRawSpec) {
  for (const auto& spec :
       {TokenizerSpec::whitespace(), TokenizerSpec::character(),
        TokenizerSpec::subword(vocab_of({"a"}))}) {
    EXPECT_TRUE(tokenize("", spec).empty()) << spec.name();
  }
}

TEST(Tokenize, WhitespaceCountEqualsWordCount) {
  std::string text;
  for (int k = 1; k <= 40; ++k) {
    text += (k > 1 ? " " : "") + std::string("w") + std::to_string(k);
    EXPECT_EQ(tokenize(text, TokenizerSpec::whitespace()).size(),
              static_cast<std::size_t>(k));
  }
}

TEST(Tokenize, StripNonwordIsOptIn) {
  auto spec = TokenizerSpec::whitespace();
  EXPECT_EQ(token_texts(tokenize("cat, dog.", spec)),
            (Strings{"cat,", "dog."}));
  spec.strip_nonword = true;
  EXPECT_EQ(token_texts(tokenize("cat, dog.", spec)), (Strings{"cat", "dog"}));
  // Non-Latin letters survive stripping.
  EXPECT_EQ(token_texts(tokenize("שלום!", spec)),
            (Strings{"שלום"}));
}

TEST(Tokenize, NfkcAndLowercase) {
  auto spec = TokenizerSpec::whitespace();
  EXPECT_EQ(token_texts(tokenize("ＡＢ c", spec)), (Strings{"AB", "c"}));
  spec.nfkc = false;
  EXPECT_EQ(token_texts(tokenize("ＡＢ", spec)),
            (Strings{"ＡＢ"}));
  spec = TokenizerSpec::whitespace();
  spec.lowercase = true;
  EXPECT_EQ(token_texts(tokenize("The CAT", spec)), (Strings{"the", "cat"}));
}

TEST(Tokenize, SpansCoverText) {
  const std::string text =
      "El gato, ＡＢ שָלום 中文 ok.";
  auto lower = TokenizerSpec::whitespace();
  lower.lowercase = true;
  for (const auto& spec :
       {TokenizerSpec::whitespace(), TokenizerSpec::character(), lower,
        TokenizerSpec::subword(vocab_of(
            {"el", "gato", ",", "ab", "ok", ".", "中", "文"}, false))}) {
    expect_spans_cover(text, spec);
  }
}

TEST(Tokenize, Determinism) {
  const std::string text = "Los gatos comen pescado. 猫吃鱼。";
  for (const auto& spec : {TokenizerSpec::whitespace(),
                           TokenizerSpec::character()}) {
    EXPECT_EQ(tokenize(text, spec), tokenize(text, spec));
  }
}

TEST(Tokenize, PretokenizedNeedsDocument) {
  EXPECT_THROW(
      tokenize("a b", TokenizerSpec::pretokenized(PretokenizedField::kSurface)),
      ValidationError);
}

TEST(Tokenize, PretokenizedFields) {
  const auto doc = testing::tagged_document(
      {"Cats ran."},
      {{"cat", "NOUN", {}}, {"run", "VERB", {}}, {".", {}, {}}});
  EXPECT_EQ(token_texts(tokenize(
                doc, TokenizerSpec::pretokenized(PretokenizedField::kSurface))),
            (Strings{"Cats", "ran", "."}));
  EXPECT_EQ(token_texts(tokenize(
                doc, TokenizerSpec::pretokenized(PretokenizedField::kLemma))),
            (Strings{"cat", "run", "."}));
  auto missing = doc;
  missing.tokens[1].lemma.reset();
  try {
    tokenize(missing, TokenizerSpec::pretokenized(PretokenizedField::kLemma));
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("ran"), std::string::npos);
  }
  // Raw specs tokenize the document's text.
  EXPECT_EQ(token_texts(tokenize(doc, TokenizerSpec::whitespace())),
            (Strings{"Cats", "ran."}));
}

TEST(Subword, GreedyLongestMatch) {
  const SubwordVocab vocab({"un", "##able", "able"});
  EXPECT_EQ(token_texts(tokenize_subword("unable", vocab)),
            (Strings{"un", "##able"}));
  EXPECT_EQ(token_texts(tokenize_subword("able", vocab)), (Strings{"able"}));
  EXPECT_EQ(token_texts(tokenize_subword("xyz", vocab)), (Strings{"[UNK]"}));
}

TEST(Subword, LongestNotFirst) {
  const SubwordVocab vocab({"a", "ab", "abc", "##d", "##cd", "##c"});
  // "abcd": longest first unit is "abc", then "##d".
  EXPECT_EQ(token_texts(tokenize_subword("abcd", vocab)),
            (Strings{"abc", "##d"}));
  // A dead end after a greedy choice maps the whole word to [UNK].
  EXPECT_EQ(token_texts(tokenize_subword("abce", vocab)), (Strings{"[UNK]"}));
}

TEST(Subword, VocabularyWordIsOneUnit) {
  const SubwordVocab vocab({"kitap", "##lar", "kitaplar", "##da"});
  for (const auto& w : vocab.entries()) {
    if (w.rfind("##", 0) == 0 || w == "[UNK]") continue;
    EXPECT_EQ(token_texts(tokenize_subword(w, vocab)), (Strings{w}));
  }
}

TEST(Subword, UnitsReconstructWord) {
  const SubwordVocab vocab({"ki", "##ta", "##p", "##lar", "##da", "ev",
                            "##ler", "ה", "##ספר"});
  for (const std::string w :
       {"kitaplarda", "evler", "הספר"}) {
    const auto units = tokenize_subword(w, vocab);
    std::string joined;
    for (const auto& u : units) {
      ASSERT_NE(u.text, "[UNK]") << w;
      joined += u.text.rfind("##", 0) == 0 ? u.text.substr(2) : u.text;
      EXPECT_EQ(w.substr(u.begin, u.end - u.begin),
                u.text.rfind("##", 0) == 0 ? u.text.substr(2) : u.text);
    }
    EXPECT_EQ(joined, w);
  }
}

TEST(Subword, VocabularyConstruction) {
  const SubwordVocab three({"a", "##b", "[UNK]"});
  EXPECT_EQ(three.size(), 3u);
  EXPECT_FALSE(three.unknown_synthesized());

  const SubwordVocab synthesized({"a", "##b"});
  EXPECT_TRUE(synthesized.unknown_synthesized());
  EXPECT_TRUE(synthesized.contains("[UNK]"));

  Diagnostics diag;
  const SubwordVocab dup({"a", "a", "##b"}, true, "##", "[UNK]", &diag);
  EXPECT_EQ(dup.size(), 3u);  // a, ##b, synthesized [UNK]
  EXPECT_EQ(diag.warnings().size(), 1u);
  EXPECT_EQ(dup.id("a"), 0u);
  EXPECT_EQ(dup.id("zzz"), dup.id("[UNK]"));

  EXPECT_THROW(SubwordVocab(Strings{}), ValidationError);
}

TEST(Subword, LoadFromFile) {
  testing::TempDir dir;
  testing::write_file(dir / "vocab.txt", "a\r\n##b\n\n[UNK]\n##b\n");
  Diagnostics diag;
  const auto vocab = load_subword_vocab(dir / "vocab.txt", true, &diag);
  EXPECT_EQ(vocab.entries(), (Strings{"a", "##b", "[UNK]"}));
  EXPECT_EQ(diag.warnings().size(), 1u);
  testing::write_file(dir / "empty.txt", "\n\n");
  EXPECT_THROW(load_subword_vocab(dir / "empty.txt"), ValidationError);
}

TEST(Subword, BasicSplitsPunctuationAndCjk) {
  const auto spec = TokenizerSpec::subword(
      vocab_of({"hola", ",", "mundo", "!", "中", "文"}));
  EXPECT_EQ(token_texts(tokenize("hola, mundo!", spec)),
            (Strings{"hola", ",", "mundo", "!"}));
  EXPECT_EQ(token_texts(tokenize("中文", spec)),
            (Strings{"中", "文"}));
}

TEST(Subword, UncasedVocabularyLowercases) {
  const auto spec = TokenizerSpec::subword(vocab_of({"hola"}, false));
  EXPECT_TRUE(spec.lowercase);
  EXPECT_EQ(token_texts(tokenize("HOLA", spec)), (Strings{"hola"}));
  EXPECT_EQ(spec.name(), "subword");
}

TEST(Subword, ToyVocabulary) {
  const auto vocab = std::make_shared<const SubwordVocab>(
      load_subword_vocab(testing::toy_dir() / "vocab.txt", /*cased=*/false));
  const auto tokens =
      tokenize("Anna Lopez visited London.", TokenizerSpec::subword(vocab));
  EXPECT_FALSE(tokens.empty());
  for (const auto& t : tokens) EXPECT_NE(t.text, "[UNK]");
}

}  // namespace
}  // namespace mlsumeval
