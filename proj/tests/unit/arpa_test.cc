// arpa_test.cc
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

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include <gmock/gmock.h>
#include <gtest/gtest.h>

#include "htrqe/arpa.h"
#include "htrqe/ngramlm.h"

namespace htrqe {
namespace {

using ::testing::HasSubstr;

TokenizedText SeededText(std::size_t n, std::uint64_t seed) {
  const std::vector<std::string> words = {"o", "romeo", "wherefore", "art", "thou",
                                          "deny", "thy", "father", "and", "refuse", "name"};
  std::mt19937_64 rng(seed);
  std::vector<std::vector<std::string>> out;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::string> s;
    for (std::size_t k = 1 + rng() % 9; k > 0; --k) s.push_back(words[rng() % words.size()]);
    out.push_back(s);
  }
  return TokenizedText::FromSentences(out);
}

TEST(ArpaTest, HandWrittenUnigramFile) {
  const std::string text =
      "\\data\\\n"
      "ngram 1=3\n"
      "\n"
      "\\1-grams:\n"
      "-0.30103\t</s>\n"
      "-0.60206\ta\n"
      "-0.60206\t<unk>\n"
      "\n"
      "\\end\\\n";
  const NGramModel m = ReadArpaString(text);
  EXPECT_EQ(m.order(), 1);
  EXPECT_EQ(m.NumNGrams(1), 3u);
  const WordId a = m.vocab().Find("a").value();
  EXPECT_EQ(m.Log10Prob({}, a), -0.60206);
  EXPECT_EQ(m.Log10Prob({}, Vocabulary::kEos), -0.30103);
  EXPECT_EQ(m.Log10Prob({}, Vocabulary::kUnk), -0.60206);
}

TEST(ArpaTest, RoundTripPreservesScoresAndIsByteStable) {
  for (int order : {1, 2, 3, 5}) {
    const NGramModel model = TrainKneserNey(SeededText(300, 17), order);
    const std::string first = WriteArpaString(model);
    const NGramModel back = ReadArpaString(first);
    EXPECT_EQ(WriteArpaString(back), first) << "order " << order;
    const TokenizedText test = SeededText(40, 18);
    EXPECT_NEAR(Perplexity(back, test).cross_entropy, Perplexity(model, test).cross_entropy, 1e-4);
    for (int k = 1; k <= order; ++k) {
      EXPECT_EQ(back.NumNGrams(k), model.NumNGrams(k));
      for (const auto &[key, entry] : model.table(k)) {
        NGramKey mapped;
        for (char32_t c : key) {
          mapped.push_back(static_cast<char32_t>(
              *back.vocab().Find(model.vocab().Word(static_cast<WordId>(c)))));
        }
        const NGramEntry *e = back.Find(mapped);
        ASSERT_NE(e, nullptr);
        EXPECT_NEAR(e->log10_prob, entry.log10_prob, 1e-4);
        if (entry.has_backoff) {
          EXPECT_NEAR(e->log10_backoff, entry.log10_backoff, 1e-4);
        }
      }
    }
  }
}

TEST(ArpaTest, MetadataSurvivesRoundTrip) {
  NGramModel model = TrainKneserNey(SeededText(100, 3), 3);
  model.metadata().prep_digest = "sha256:abc";
  const NGramModel back = ReadArpaString(WriteArpaString(model));
  EXPECT_EQ(back.metadata().estimator, model.metadata().estimator);
  EXPECT_EQ(back.metadata().source_digest, model.metadata().source_digest);
  EXPECT_EQ(back.metadata().prep_digest, "sha256:abc");
  ASSERT_EQ(back.metadata().discounts.size(), 3u);
  for (std::size_t k = 0; k < 3; ++k) {
    const auto &a = back.metadata().discounts[k];
    const auto &b = model.metadata().discounts[k];
    EXPECT_EQ(a.d1, b.d1);
    EXPECT_EQ(a.d2, b.d2);
    EXPECT_EQ(a.d3plus, b.d3plus);
    EXPECT_EQ(a.fallback, b.fallback);
    EXPECT_EQ(a.count_of_counts, b.count_of_counts);
  }
}

std::size_t ParseErrorLine(const std::string &text, const std::string &needle) {
  try {
    ReadArpaString(text);
  } catch (const ArpaParseError &e) {
    EXPECT_THAT(e.what(), HasSubstr(needle));
    return e.line();
  }
  ADD_FAILURE() << "no parse error for:\n" << text;
  return 999;
}

TEST(ArpaTest, StructuredParseErrors) {
  const std::string good = WriteArpaString(TrainKneserNey(SeededText(20, 1), 2));
  const std::string truncated = good.substr(0, good.find("\\2-grams:"));
  EXPECT_EQ(ParseErrorLine(truncated, "\\2-grams:"), 0u);

  EXPECT_EQ(ParseErrorLine("hello\n", "\\data\\"), 0u);
  EXPECT_EQ(ParseErrorLine("\\data\\\nngram 2=1\n", "in sequence"), 2u);
  EXPECT_EQ(ParseErrorLine("\\data\\\nngram 1=1\n\n\\1-grams:\nabc\ta\n\n\\end\\\n",
                           "unparsable probability"),
            5u);
  EXPECT_EQ(ParseErrorLine("\\data\\\nngram 1=2\n\n\\1-grams:\n-1\ta\n\n\\end\\\n",
                           "announces 2"),
            4u);
  EXPECT_EQ(ParseErrorLine("\\data\\\nngram 1=2\n\n\\1-grams:\n-1\ta\n-1\ta\n\n\\end\\\n",
                           "duplicate"),
            6u);
  EXPECT_EQ(ParseErrorLine("\\data\\\nngram 1=1\n\n\\2-grams:\n-1\ta b\n", "expected section"),
            4u);
  EXPECT_EQ(ParseErrorLine("\\data\\\nngram 1=1\n\n\\1-grams:\n-1\ta\n", "\\end\\"), 0u);
  EXPECT_EQ(ParseErrorLine("\\data\\\nngram 1=1\n\n\\1-grams:\n-1\ta\tb\tc\n\n\\end\\\n",
                           "fields"),
            5u);
}

}  // namespace
}  // namespace htrqe
