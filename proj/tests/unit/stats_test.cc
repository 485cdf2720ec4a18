// stats_test.cc
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

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include <gmock/gmock.h>
#include <gtest/gtest.h>

#include "htrqe/error.h"
#include "htrqe/special_functions.h"
#include "htrqe/stats.h"

namespace htrqe {
namespace {

using ::testing::ElementsAre;

Ranking Scores(const std::vector<double> &values, Direction direction) {
  std::vector<std::pair<std::string, double>> items;
  for (std::size_t i = 0; i < values.size(); ++i) {
    items.emplace_back("m" + std::to_string(10 + i), values[i]);
  }
  return Rank(items, direction);
}

std::vector<double> RanksInInputOrder(const Ranking &r) {
  std::vector<double> out;
  for (const auto &[id, score] : r.items) out.push_back(r.RankOf(id));
  return out;
}

TEST(RankTest, Examples) {
  EXPECT_THAT(RanksInInputOrder(Scores({0.03, 0.05, 0.04}, Direction::kLowerIsBetter)),
              ElementsAre(1, 3, 2));
  EXPECT_THAT(RanksInInputOrder(Scores({0.9, 0.9, 0.7}, Direction::kHigherIsBetter)),
              ElementsAre(1.5, 1.5, 3));
  EXPECT_THAT(RanksInInputOrder(Scores({0.4}, Direction::kHigherIsBetter)), ElementsAre(1));
}

TEST(RankTest, PositionsAndOrder) {
  const Ranking r = Scores({0.9, 0.9, 0.7, 0.95}, Direction::kHigherIsBetter);
  EXPECT_EQ(r.PositionOf("m13"), 1u);
  EXPECT_EQ(r.PositionOf("m10"), 2u);
  EXPECT_EQ(r.PositionOf("m11"), 2u);
  EXPECT_EQ(r.PositionOf("m12"), 4u);
  EXPECT_THAT(r.Ordered(), ElementsAre("m13", "m10", "m11", "m12"));
}

TEST(RankTest, Errors) {
  EXPECT_THROW(Rank({}, Direction::kLowerIsBetter), Error);
  EXPECT_THROW(Rank({{"a", std::nan("")}}, Direction::kLowerIsBetter), Error);
  EXPECT_THROW(Rank({{"a", 1}, {"a", 2}}, Direction::kLowerIsBetter), Error);
  EXPECT_EQ(ParseDirection(DirectionName(Direction::kHigherIsBetter)),
            Direction::kHigherIsBetter);
}

TEST(AverageRanksTest, Ties) {
  const std::vector<double> v = {3, 1, 3, 2, 3};
  EXPECT_THAT(AverageRanks(v), ElementsAre(4, 1, 4, 2, 4));
}

TEST(SpearmanTest, Examples) {
  const auto id = Spearman(Scores({1, 2, 3, 4, 5}, Direction::kHigherIsBetter),
                           Scores({1, 2, 3, 4, 5}, Direction::kHigherIsBetter));
  EXPECT_DOUBLE_EQ(id.rho, 1.0);
  const auto rev = Spearman(Scores({1, 2, 3, 4}, Direction::kHigherIsBetter),
                            Scores({4, 3, 2, 1}, Direction::kHigherIsBetter));
  EXPECT_DOUBLE_EQ(rev.rho, -1.0);
  const auto hand = Spearman(Scores({1, 2, 3, 4}, Direction::kLowerIsBetter),
                             Scores({2, 1, 4, 3}, Direction::kLowerIsBetter));
  EXPECT_EQ(hand.d_squared_sum, 4.0);
  EXPECT_EQ(hand.rho, 0.6);
  EXPECT_FALSE(hand.tie_fallback);
  EXPECT_EQ(hand.n, 4u);
}

TEST(SpearmanTest, DirectionIsRespected) {
  // A lower-is-better metric that tracks CER perfectly correlates at +1.
  const auto r = Spearman(Scores({10, 20, 30, 40}, Direction::kLowerIsBetter),
                          Scores({0.1, 0.2, 0.3, 0.4}, Direction::kLowerIsBetter));
  EXPECT_DOUBLE_EQ(r.rho, 1.0);
}

TEST(SpearmanTest, TiesFallBackToPearsonOnRanks) {
  const Ranking a = Scores({1, 1, 2, 3, 4}, Direction::kHigherIsBetter);
  const Ranking b = Scores({1, 2, 3, 4, 5}, Direction::kHigherIsBetter);
  const auto r = Spearman(a, b);
  EXPECT_TRUE(r.tie_fallback);
  const auto ra = RanksInInputOrder(a);
  const auto rb = RanksInInputOrder(b);
  EXPECT_NEAR(r.rho, Pearson(ra, rb), 1e-15);
}

TEST(SpearmanTest, Errors) {
  EXPECT_THROW(Spearman(Scores({1, 2}, Direction::kHigherIsBetter),
                        Scores({1, 2}, Direction::kHigherIsBetter)),
               UndefinedError);
  EXPECT_THROW(Spearman(Scores({1, 1, 1}, Direction::kHigherIsBetter),
                        Scores({1, 2, 3}, Direction::kHigherIsBetter)),
               UndefinedError);
  const Ranking a = Rank({{"a", 1}, {"b", 2}, {"c", 3}}, Direction::kHigherIsBetter);
  const Ranking b = Rank({{"a", 1}, {"b", 2}, {"d", 3}}, Direction::kHigherIsBetter);
  try {
    Spearman(a, b);
    FAIL();
  } catch (const Error &e) {
    EXPECT_THAT(e.what(), ::testing::HasSubstr("c"));
    EXPECT_THAT(e.what(), ::testing::HasSubstr("d"));
  }
}

TEST(SpearmanTest, EqualsPearsonOnRanksForRandomPermutations) {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 3 + rng() % 18;
    std::vector<double> x(n), y(n);
    std::iota(x.begin(), x.end(), 1.0);
    std::iota(y.begin(), y.end(), 1.0);
    std::shuffle(y.begin(), y.end(), rng);
    const auto r = Spearman(Scores(x, Direction::kHigherIsBetter),
                            Scores(y, Direction::kHigherIsBetter));
    EXPECT_NEAR(r.rho, Pearson(x, y), 1e-12);
  }
}

TEST(SpearmanTest, InvariantUnderMonotoneTransforms) {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(0.01, 5.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> x(9), y(9);
    for (auto &v : x) v = u(rng);
    for (auto &v : y) v = u(rng);
    std::vector<double> tx, ty;
    for (double v : x) tx.push_back(std::exp(3 * v) + 1);
    for (double v : y) ty.push_back(std::log(v));
    const auto a = Spearman(Scores(x, Direction::kHigherIsBetter),
                            Scores(y, Direction::kHigherIsBetter));
    const auto b = Spearman(Scores(tx, Direction::kHigherIsBetter),
                            Scores(ty, Direction::kHigherIsBetter));
    EXPECT_NEAR(a.rho, b.rho, 1e-12);
    EXPECT_NEAR(a.p_value, b.p_value, 1e-12);
  }
}

TEST(SpearmanTest, ExactAndApproximatePValuesAgreeOnOrdering) {
  std::mt19937_64 rng(13);
  const std::size_t n = kExactPermutationMaxN;
  struct Row {
    double rho, exact, approx;
  };
  std::vector<Row> rows;
  for (int trial = 0; trial < 60; ++trial) {
    std::vector<double> x(n), y(n);
    std::iota(x.begin(), x.end(), 1.0);
    std::iota(y.begin(), y.end(), 1.0);
    std::shuffle(y.begin(), y.end(), rng);
    const auto r = Spearman(Scores(x, Direction::kHigherIsBetter),
                            Scores(y, Direction::kHigherIsBetter));
    ASSERT_EQ(r.p_method, "exact-permutation");
    const double rho = std::min(std::abs(r.rho), 1 - 1e-12);
    const double t = rho * std::sqrt((n - 2) / (1 - rho * rho));
    rows.push_back({std::abs(r.rho), r.p_value, 2 * StudentTSurvival(t, n - 2)});
  }
  for (const auto &a : rows) {
    for (const auto &b : rows) {
      if (a.rho > b.rho + 1e-9) {
        EXPECT_LE(a.exact, b.exact);
        EXPECT_LE(a.approx, b.approx);
      }
    }
  }
}

TEST(SignificanceTest, Bins) {
  EXPECT_EQ(SignificanceLevel(0.03), 0.05);
  EXPECT_EQ(SignificanceLevel(0.05), 0.05);
  EXPECT_EQ(SignificanceLevel(0.02), 0.025);
  EXPECT_EQ(SignificanceLevel(0.0004), 0.001);
  EXPECT_FALSE(SignificanceLevel(0.2).has_value());
}

TEST(PolyfitTest, PerfectLine) {
  const std::vector<double> x = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6};
  std::vector<double> y;
  for (double v : x) y.push_back(2 * v);
  const RegressionFit fit = FitPolynomial(x, y, 1);
  EXPECT_NEAR(fit.r2, 1.0, 1e-12);
  EXPECT_NEAR(fit.adjusted_r2, 1.0, 1e-12);
  ASSERT_EQ(fit.coefficients.size(), 2u);
  EXPECT_NEAR(fit.coefficients[0], 0.0, 1e-12);
  EXPECT_NEAR(fit.coefficients[1], 2.0, 1e-12);
  EXPECT_NEAR(fit.Predict(0.75), 1.5, 1e-12);
  EXPECT_EQ(PolyfitAdjusted(x, y).best.degree, 1);
}

TEST(PolyfitTest, NoiseGivesAdjustedBelowRawAndCanGoNegative) {
  std::mt19937_64 rng(31);
  std::normal_distribution<double> noise(0, 1);
  bool saw_negative = false;
  for (int trial = 0; trial < 40; ++trial) {
    std::vector<double> x(10), y(10);
    for (std::size_t i = 0; i < x.size(); ++i) {
      x[i] = static_cast<double>(i);
      y[i] = noise(rng);
    }
    for (const auto &fit : PolyfitAdjusted(x, y).fits) {
      EXPECT_LE(fit.adjusted_r2, fit.r2);
      saw_negative = saw_negative || fit.adjusted_r2 < 0;
    }
  }
  EXPECT_TRUE(saw_negative);
}

TEST(PolyfitTest, AdjustedDecreasesWhenDegreeAddsNothing) {
  // Symmetric x with even y: the cubic term cannot improve the quadratic fit.
  const std::vector<double> x = {-3, -2, -1, 0, 1, 2, 3};
  const std::vector<double> y = {5, 1, 2, 0, 2, 1, 5};
  const RegressionFit quad = FitPolynomial(x, y, 2);
  const RegressionFit cubic = FitPolynomial(x, y, 3);
  EXPECT_NEAR(quad.r2, cubic.r2, 1e-12);
  EXPECT_LT(cubic.adjusted_r2, quad.adjusted_r2);
  EXPECT_EQ(PolyfitAdjusted(x, y, {2, 3}).best.degree, 2);
}

TEST(PolyfitTest, Errors) {
  EXPECT_THROW(FitPolynomial(std::vector<double>{1, 2}, std::vector<double>{1, 2}, 1), Error);
  EXPECT_THROW(FitPolynomial(std::vector<double>{1, 1, 1, 1}, std::vector<double>{1, 2, 3, 4}, 1),
               UndefinedError);
  EXPECT_THROW(FitPolynomial(std::vector<double>{1, 2, 3, 4}, std::vector<double>{2, 2, 2, 2}, 1),
               UndefinedError);
}

TEST(TopNTest, Examples) {
  const Ranking reference =
      Scores({0.01, 0.02, 0.03, 0.04, 0.05, 0.06, 0.07, 0.08, 0.09}, Direction::kLowerIsBetter);
  auto metric_with_top = [](std::size_t top) {
    std::vector<double> s(9, 0.5);
    s[top] = 0.9;
    for (std::size_t i = 0; i < 9; ++i) {
      if (i != top) s[i] = 0.1 * static_cast<double>(i) / 9;
    }
    return Scores(s, Direction::kHigherIsBetter);
  };
  EXPECT_EQ(TopNHit(metric_with_top(0), reference), 1);
  EXPECT_EQ(TopNHit(metric_with_top(3), reference), 5);
  EXPECT_EQ(TopNHit(metric_with_top(8), reference), std::nullopt);
  EXPECT_EQ(TopNHit(metric_with_top(1), reference), 3);
}

TEST(TopNTest, RankingAgainstItselfHitsTopOne) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> s(2 + rng() % 10);
    for (auto &v : s) v = static_cast<double>(rng() % 5);
    const Ranking r = Scores(s, trial % 2 ? Direction::kHigherIsBetter : Direction::kLowerIsBetter);
    EXPECT_EQ(TopNHit(r, r), 1);
  }
}

TEST(TopNTest, TiedMetricTopUsesWorstReferencePosition) {
  const Ranking reference = Scores({0.01, 0.02, 0.03, 0.04}, Direction::kLowerIsBetter);
  const Ranking metric = Scores({0.9, 0.5, 0.5, 0.9}, Direction::kHigherIsBetter);
  EXPECT_EQ(TopNHit(metric, reference), 5);
}

TEST(AnovaTest, Examples) {
  const AnovaResult same = AnovaSingleFactor({{1, 2, 3}, {1, 2, 3}, {1, 2, 3}});
  EXPECT_EQ(same.f_stat, 0.0);
  EXPECT_DOUBLE_EQ(same.p_value, 1.0);
  EXPECT_THROW(AnovaSingleFactor({{0, 0}, {1, 1}}), UndefinedError);
  EXPECT_THROW(AnovaSingleFactor({{1, 2, 3}}), Error);
  EXPECT_THROW(AnovaSingleFactor({{1, 2}, {3}}), Error);
}

}  // namespace
}  // namespace htrqe
