// kn_oracle_test.cc
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

#include <gtest/gtest.h>

#include "htrqe/ngramlm.h"
#include "htrqe/textprep.h"
#include "oracles/kn_oracle.h"

namespace htrqe {
namespace {

using Sentences = std::vector<std::vector<std::string>>;

// Seeded sentences over a skewed 12-word vocabulary.
Sentences ToyCorpus(std::size_t count, std::uint64_t seed) {
  static const std::vector<std::string> kWords = {"the", "a",   "dog", "cat", "sees", "runs",
                                                  "and", "old", "big", "red", "sat",  "on"};
  std::mt19937_64 rng(seed);
  std::discrete_distribution<std::size_t> pick({12, 11, 10, 9, 8, 7, 6, 5, 4, 3, 2, 1});
  Sentences out;
  for (std::size_t s = 0; s < count; ++s) {
    std::vector<std::string> sentence;
    const std::size_t len = 1 + rng() % 7;
    for (std::size_t i = 0; i < len; ++i) sentence.push_back(kWords[pick(rng)]);
    out.push_back(sentence);
  }
  return out;
}

std::vector<WordId> Ids(const NGramModel &model, const std::vector<std::string> &words) {
  std::vector<WordId> ids;
  for (const auto &w : words) ids.push_back(model.vocab().Find(w).value_or(Vocabulary::kUnk));
  return ids;
}

void ExpectMatchesOracle(const Sentences &corpus, int order, bool interpolate_unigrams) {
  KnOptions options;
  options.interpolate_unigrams = interpolate_unigrams;
  const NGramModel model = TrainKneserNey(TokenizedText::FromSentences(corpus), order, options);
  const testing::KnOracle oracle(corpus, order, 0.75, interpolate_unigrams);

  auto histories = oracle.FullHistories();
  // Unseen histories exercise pure back-off.
  histories.insert(std::vector<std::string>(static_cast<std::size_t>(order - 1), "red"));
  histories.insert(std::vector<std::string>(static_cast<std::size_t>(order - 1), "zebra"));
  std::size_t compared = 0;
  for (const auto &history : histories) {
    const auto context = Ids(model, history);
    for (const auto &word : oracle.PredictableWords()) {
      const double expected = std::log10(oracle.Prob(history, word));
      const double actual = model.Log10Prob(context, Ids(model, {word}).front());
      ASSERT_NEAR(actual, expected, 1e-9) << "order " << order << " word " << word;
      ++compared;
    }
  }
  EXPECT_GT(compared, 0u);
}

TEST(KneserNeyOracleTest, MatchesBruteForceEveryOrder) {
  const Sentences corpus = ToyCorpus(50, 20240611);
  for (int order = 1; order <= 4; ++order) ExpectMatchesOracle(corpus, order, true);
}

TEST(KneserNeyOracleTest, MatchesBruteForceWithUnkLeftover) {
  const Sentences corpus = ToyCorpus(50, 20240611);
  for (int order = 1; order <= 3; ++order) ExpectMatchesOracle(corpus, order, false);
}

TEST(KneserNeyOracleTest, MatchesBruteForceOnLargerCorpus) {
  ExpectMatchesOracle(ToyCorpus(400, 99), 3, true);
}

}  // namespace
}  // namespace htrqe
