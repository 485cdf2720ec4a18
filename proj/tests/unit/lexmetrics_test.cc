// lexmetrics_test.cc
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

#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <gmock/gmock.h>
#include <gtest/gtest.h>

#include "htrqe/corrupt.h"
#include "htrqe/error.h"
#include "htrqe/lexmetrics.h"
#include "htrqe/textprep.h"

namespace htrqe {
namespace {

using ::testing::UnorderedElementsAre;

TokenizedText Tokens(std::vector<std::string> tokens) {
  return TokenizedText::FromSentences({std::move(tokens)});
}

TEST(LexiconTest, SetOfTypes) {
  EXPECT_THAT(BuildLexicon(Tokens({"a", "b", "a"})).types, UnorderedElementsAre("a", "b"));
  EXPECT_THAT(BuildLexicon(Tokens({"x"})).types, UnorderedElementsAre("x"));
  EXPECT_THROW(BuildLexicon(TokenizedText()), UndefinedError);
}

TEST(LexiconTest, FarFewerTypesThanTokensOnRealText) {
  std::vector<std::string> lines;
  for (int i = 0; i < 200; ++i) {
    lines.push_back("the king and the queen went to the " + std::to_string(i % 7) + " hall.");
  }
  const TokenizedText t = Tokenize(RawCorpus{lines, "t"}, PrepConfig());
  EXPECT_LT(BuildLexicon(t).types.size() * 20, t.tokens.size());
}

TEST(TokenRatioTest, CountsOccurrences) {
  Lexicon lex = BuildLexicon(Tokens({"ave", "caesar"}));
  const RatioScore r = TokenRatio(Tokens({"ave", "caesar", "xqz"}), lex);
  EXPECT_EQ(r.hits, 2u);
  EXPECT_EQ(r.total, 3u);
  EXPECT_NEAR(r.value, 2.0 / 3.0, 1e-15);
  EXPECT_DOUBLE_EQ(TokenRatio(Tokens({"ave", "ave"}), lex).value, 1.0);
  EXPECT_NEAR(TokenRatio(Tokens({"a", "a", "b"}), BuildLexicon(Tokens({"a"}))).value, 2.0 / 3.0,
              1e-15);
  EXPECT_EQ(r.metric_id, "token_ratio");
}

TEST(TokenRatioTest, ReferenceAgainstItselfIsOne) {
  const TokenizedText ref = Tokenize(
      RawCorpus{{"Now is the winter of our discontent.", "Made glorious summer!"}, "r"},
      PrepConfig());
  EXPECT_EQ(TokenRatio(ref, BuildLexicon(ref)).value, 1.0);
}

TEST(TokenRatioTest, UndefinedOnEmptyHypothesis) {
  EXPECT_THROW(TokenRatio(TokenizedText(), BuildLexicon(Tokens({"a"}))), UndefinedError);
}

TEST(CharNGramTest, PaddingRule) {
  EXPECT_THAT(PaddedCharNGrams("abc", 2), ::testing::ElementsAre("⟨a", "ab", "bc", "c⟩"));
  EXPECT_THAT(PaddedCharNGrams("a", 2), ::testing::ElementsAre("⟨a", "a⟩"));
  EXPECT_THAT(PaddedCharNGrams("abc", 7), ::testing::ElementsAre("⟨⟨abc⟩⟩"));
  EXPECT_THAT(PaddedCharNGrams("ab", 1), ::testing::ElementsAre("a", "b"));
}

TEST(NGramSetTest, BuildWithinToken) {
  const NGramSet gs = BuildNGramSet(Tokens({"abc"}), 2);
  EXPECT_THAT(gs.grams, UnorderedElementsAre("⟨a", "ab", "bc", "c⟩"));
}

TEST(NGramSetTest, HighOrderOverShortTokensOnlyYieldsPaddedGrams) {
  const NGramSet gs = BuildNGramSet(Tokens({"abc", "ab", "a"}), 7);
  for (const auto &g : gs.grams) EXPECT_TRUE(g.starts_with("⟨")) << g;
  EXPECT_THAT(gs.grams, UnorderedElementsAre("⟨⟨abc⟩⟩", "⟨⟨⟨ab⟩⟩", "⟨⟨ab⟩⟩⟩", "⟨⟨⟨a⟩⟩⟩"));
}

TEST(NGramSetTest, CrossTokenSpansSpaces) {
  const NGramSet gs = BuildNGramSet(Tokens({"ab", "c"}), 3, GramExtraction::kCrossToken);
  EXPECT_TRUE(gs.Contains("b c"));
  EXPECT_EQ(NGramRatioId(3, GramExtraction::kCrossToken), "3gram_ratio_cross");
}

TEST(NGramSetTest, RejectsBadOrders) {
  EXPECT_THROW(BuildNGramSet(Tokens({"a"}), 0), Error);
  EXPECT_THROW(BuildNGramSet(Tokens({"a"}), 8), Error);
  EXPECT_NO_THROW(BuildNGramSet(Tokens({"a"}), 8, GramExtraction::kWithinToken, 8));
}

TEST(NGramRatioTest, HandExamples) {
  NGramSet gs;
  gs.order = 2;
  gs.grams = {"ab"};
  const std::vector<std::string> hyp = {"ab", "bc"};
  EXPECT_DOUBLE_EQ(NGramRatio(hyp, gs).value, 0.5);

  const NGramSet ref = BuildNGramSet(Tokens({"abcdef", "ghi"}), 3);
  EXPECT_DOUBLE_EQ(NGramRatio(Tokens({"abcdef"}), ref).value, 1.0);
  EXPECT_DOUBLE_EQ(NGramRatio(Tokens({"zzzz", "qqq"}), ref).value, 0.0);
  EXPECT_THROW(NGramRatio(TokenizedText(), ref), UndefinedError);
}

TEST(RatioPropertyTest, ValuesStayInUnitInterval) {
  std::mt19937_64 rng(5);
  const TokenizedText ref = Tokens({"lorem", "ipsum", "dolor", "sit", "amet"});
  const Lexicon lex = BuildLexicon(ref);
  const NGramSet gs = BuildNGramSet(ref, 3);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::string> hyp;
    for (int i = 0; i < 5; ++i) {
      std::string t;
      for (std::size_t n = 1 + rng() % 6; n > 0; --n) t += static_cast<char>('a' + rng() % 26);
      hyp.push_back(t);
    }
    for (double v : {TokenRatio(Tokens(hyp), lex).value, NGramRatio(Tokens(hyp), gs).value}) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
    }
  }
}

TEST(RatioPropertyTest, TokenRatioDecreasesUnderCorruption) {
  std::vector<std::string> lines;
  std::mt19937_64 rng(11);
  const std::vector<std::string> words = {"good", "my", "lord", "what", "news", "from",
                                          "the",  "court", "sir", "none", "but", "well"};
  for (int i = 0; i < 300; ++i) {
    std::string line;
    for (int w = 0; w < 8; ++w) line += (w ? " " : "") + words[rng() % words.size()];
    lines.push_back(line);
  }
  const PrepConfig cfg;
  const Lexicon lex = BuildLexicon(Tokenize(RawCorpus{lines, "r"}, cfg));
  double previous = 2.0;
  for (double p : {0.0, 0.05, 0.1, 0.2, 0.3}) {
    CorruptionSpec spec;
    spec.target_cer = p;
    spec.seed = 3;
    const auto hyp = Tokenize(RawCorpus{Corrupt(lines, spec).lines, "h"}, cfg);
    const double v = TokenRatio(hyp, lex).value;
    EXPECT_LE(v, previous) << "p=" << p;
    previous = v;
  }
}

TEST(RatioPropertyTest, HigherOrdersSufferMoreFromBrokenGrams) {
  const TokenizedText ref = Tokens({"abcdefgh", "ijklmnop"});
  const TokenizedText hyp = Tokens({"abcXefgh", "ijklmnoY"});
  double previous = 1.0;
  for (int n = 2; n <= 7; ++n) {
    const double v = NGramRatio(hyp, BuildNGramSet(ref, n)).value;
    EXPECT_LE(v, previous) << "n=" << n;
    previous = v;
  }
}

TEST(PersistenceTest, LexiconRoundTrip) {
  Lexicon lex = BuildLexicon(Tokens({"b", "a", "ä"}));
  lex.prep_digest = "sha256:x";
  std::stringstream s;
  WriteLexicon(s, lex);
  const Lexicon back = ReadLexicon(s);
  EXPECT_EQ(back.types, lex.types);
  EXPECT_EQ(back.built_from, lex.built_from);
  EXPECT_EQ(back.prep_digest, "sha256:x");
}

TEST(PersistenceTest, NGramSetRoundTripAndValidation) {
  const NGramSet gs = BuildNGramSet(Tokens({"abc", "äöü"}), 3, GramExtraction::kCrossToken);
  std::stringstream s;
  WriteNGramSet(s, gs);
  const NGramSet back = ReadNGramSet(s);
  EXPECT_EQ(back.grams, gs.grams);
  EXPECT_EQ(back.order, 3);
  EXPECT_EQ(back.extraction, GramExtraction::kCrossToken);

  std::stringstream bad(R"({"kind":"ngrams","order":3,"count":1})" "\nab\n");
  EXPECT_THROW(ReadNGramSet(bad), Error);
  std::stringstream wrong_count(R"({"kind":"lexicon","count":2})" "\na\n");
  EXPECT_THROW(ReadLexicon(wrong_count), Error);
}

}  // namespace
}  // namespace htrqe
