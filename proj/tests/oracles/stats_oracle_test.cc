// stats_oracle_test.cc
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
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "htrqe/stats.h"

namespace htrqe {
namespace {

// Least squares by the normal equations, solved with Gauss-Jordan
// elimination in long double.
std::vector<double> NormalEquationFit(const std::vector<double> &xs,
                                      const std::vector<double> &ys, int degree) {
  const std::size_t m = static_cast<std::size_t>(degree) + 1;
  std::vector<std::vector<long double>> a(m, std::vector<long double>(m + 1, 0.0L));
  for (std::size_t i = 0; i < xs.size(); ++i) {
    std::vector<long double> pow(2 * m, 1.0L);
    for (std::size_t k = 1; k < pow.size(); ++k) pow[k] = pow[k - 1] * xs[i];
    for (std::size_t r = 0; r < m; ++r) {
      for (std::size_t c = 0; c < m; ++c) a[r][c] += pow[r + c];
      a[r][m] += pow[r] * ys[i];
    }
  }
  for (std::size_t p = 0; p < m; ++p) {
    std::size_t best = p;
    for (std::size_t r = p + 1; r < m; ++r) {
      if (std::fabs(a[r][p]) > std::fabs(a[best][p])) best = r;
    }
    std::swap(a[p], a[best]);
    for (std::size_t r = 0; r < m; ++r) {
      if (r == p) continue;
      const long double f = a[r][p] / a[p][p];
      for (std::size_t c = p; c <= m; ++c) a[r][c] -= f * a[p][c];
    }
  }
  std::vector<double> coef(m);
  for (std::size_t r = 0; r < m; ++r) coef[r] = static_cast<double>(a[r][m] / a[r][r]);
  return coef;
}

TEST(StatsOracleTest, PolynomialFitMatchesNormalEquations) {
  const std::vector<double> xs = {0.95, 0.91, 0.88, 0.84, 0.80, 0.77, 0.71, 0.66, 0.62, 0.55};
  const std::vector<double> ys = {0.021, 0.034, 0.041, 0.060, 0.071, 0.083, 0.110, 0.121,
                                  0.150, 0.178};
  for (int degree = 1; degree <= 3; ++degree) {
    const RegressionFit fit = FitPolynomial(xs, ys, degree);
    const auto expected = NormalEquationFit(xs, ys, degree);
    ASSERT_EQ(fit.coefficients.size(), expected.size());
    for (std::size_t k = 0; k < expected.size(); ++k) {
      EXPECT_NEAR(fit.coefficients[k], expected[k], 1e-8 * std::max(1.0, std::abs(expected[k])))
          << "degree " << degree << " coefficient " << k;
    }
    // R² from the oracle's residuals.
    double mean = 0;
    for (double y : ys) mean += y / ys.size();
    double ss_res = 0, ss_tot = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      double pred = 0, p = 1;
      for (double c : expected) {
        pred += c * p;
        p *= xs[i];
      }
      ss_res += (ys[i] - pred) * (ys[i] - pred);
      ss_tot += (ys[i] - mean) * (ys[i] - mean);
    }
    const double r2 = 1 - ss_res / ss_tot;
    const double n = static_cast<double>(xs.size());
    EXPECT_NEAR(fit.r2, r2, 1e-10);
    EXPECT_NEAR(fit.adjusted_r2, 1 - (1 - r2) * (n - 1) / (n - degree - 1), 1e-10);
  }
}

Ranking FromScores(const std::vector<double> &scores) {
  std::vector<std::pair<std::string, double>> items;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    items.emplace_back("m" + std::to_string(100 + i), scores[i]);
  }
  return Rank(items, Direction::kHigherIsBetter);
}

TEST(StatsOracleTest, ExactPermutationPValuesMatchScipyEnumeration) {
  // Frozen from a full enumeration of the 720 permutations with scipy ranks.
  const Ranking a = FromScores({1, 2, 3, 4, 5, 6});
  const Ranking b = FromScores({2, 1, 4, 3, 6, 5});
  const auto two = Spearman(a, b, Alternative::kTwoSided);
  EXPECT_EQ(two.p_method, "exact-permutation");
  EXPECT_NEAR(two.rho, 0.8285714285714283, 1e-12);
  EXPECT_NEAR(two.p_value, 0.058333333333333334, 1e-12);
  EXPECT_NEAR(Spearman(a, b, Alternative::kGreater).p_value, 0.029166666666666667, 1e-12);
  EXPECT_NEAR(Spearman(a, b, Alternative::kLess).p_value, 0.9833333333333333, 1e-12);
}

TEST(StatsOracleTest, TApproximationMatchesScipy) {
  // scipy.stats.spearmanr on n = 12.
  std::vector<double> x, y;
  for (int i = 1; i <= 12; ++i) {
    x.push_back(i);
    y.push_back(i % 2 == 1 ? i + 1 : i - 1);
  }
  const auto two = Spearman(FromScores(x), FromScores(y));
  EXPECT_EQ(two.p_method, "t-approximation");
  EXPECT_NEAR(two.rho, 0.9580419580419581, 1e-12);
  EXPECT_NEAR(two.p_value, 9.5435818268384e-07, 1e-15);
  EXPECT_NEAR(Spearman(FromScores(x), FromScores(y), Alternative::kGreater).p_value,
              4.7717909134192e-07, 1e-15);
}

TEST(StatsOracleTest, AnovaMatchesHandDecompositionAndScipy) {
  const std::vector<std::vector<double>> groups = {
      {6, 8, 4, 5, 3}, {8, 12, 9, 11, 6}, {13, 9, 11, 8, 7}};
  const AnovaResult r = AnovaSingleFactor(groups);
  // Group means 5.2, 9.2, 9.6 around a grand mean of 8.
  EXPECT_NEAR(r.ss_between, 59.2, 1e-9);
  EXPECT_NEAR(r.ss_within, 14.8 + 22.8 + 23.2, 1e-9);
  EXPECT_EQ(r.df_between, 2u);
  EXPECT_EQ(r.df_within, 12u);
  // scipy.stats.f_oneway.
  EXPECT_NEAR(r.f_stat, 5.842105263157896, 1e-9);
  EXPECT_NEAR(r.p_value, 0.01691741485440876, 1e-9);
}

}  // namespace
}  // namespace htrqe
