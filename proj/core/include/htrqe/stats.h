// stats.h
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
//
// Ranking, rank correlation, polynomial regression, Top-N hits and one-way
// ANOVA.

#ifndef HTRQE_STATS_H_
#define HTRQE_STATS_H_

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace htrqe {

enum class Direction { kLowerIsBetter, kHigherIsBetter };

std::string_view DirectionName(Direction direction);
Direction ParseDirection(std::string_view name);

// Average ranks in ascending order of `values` (smallest value gets rank 1).
std::vector<double> AverageRanks(std::span<const double> values);

struct Ranking {
  std::vector<std::pair<std::string, double>> items;
  std::map<std::string, double> ranks;
  Direction direction = Direction::kLowerIsBetter;

  double RankOf(const std::string &id) const;
  // 1 + number of items strictly better than `id`.
  std::size_t PositionOf(const std::string &id) const;
  // Ids ordered from best to worst; ties keep input order.
  std::vector<std::string> Ordered() const;
};

// The best score gets rank 1; ties share the mean of the positions they
// cover. Throws Error on an empty list, a non-finite score or a duplicate id.
Ranking Rank(std::vector<std::pair<std::string, double>> scores, Direction direction);

// Throws UndefinedError if either vector has zero variance.
double Pearson(std::span<const double> x, std::span<const double> y);

enum class Alternative { kTwoSided, kGreater, kLess };

std::string_view AlternativeName(Alternative alternative);
Alternative ParseAlternative(std::string_view name);

inline constexpr std::array<double, 5> kSignificanceLevels = {0.05, 0.025, 0.01,
                                                              0.005, 0.001};

// Smallest level in kSignificanceLevels that p does not exceed.
std::optional<double> SignificanceLevel(double p_value);

inline constexpr std::size_t kExactPermutationMaxN = 8;

struct RankCorrelation {
  double rho = 0.0;
  std::size_t n = 0;
  double d_squared_sum = 0.0;
  double p_value = 1.0;
  std::optional<double> significance_level;
  // True when ties forced Pearson correlation of the average ranks.
  bool tie_fallback = false;
  std::string p_method;  // "exact-permutation" or "t-approximation"
  Alternative alternative = Alternative::kTwoSided;
};

// Items are matched by id. Throws Error listing the symmetric difference when
// the id sets differ, UndefinedError when n < 3 or a ranking is constant.
RankCorrelation Spearman(const Ranking &a, const Ranking &b,
                         Alternative alternative = Alternative::kTwoSided);

struct RegressionFit {
  int degree = 0;
  // Ascending powers of x.
  std::vector<double> coefficients;
  double r2 = 0.0;
  double adjusted_r2 = 0.0;
  std::size_t n = 0;

  double Predict(double x) const;
};

// Least squares through a column-pivoted QR on centred and scaled x.
// Throws Error unless n > degree + 1, UndefinedError for a constant x or y or
// a rank-deficient design.
RegressionFit FitPolynomial(std::span<const double> xs, std::span<const double> ys,
                            int degree);

struct PolyfitResult {
  RegressionFit best;
  std::vector<RegressionFit> fits;  // ascending degree
};

// Best fit has maximal adjusted R²; ties go to the lowest degree.
PolyfitResult PolyfitAdjusted(std::span<const double> xs, std::span<const double> ys,
                              std::vector<int> degrees = {1, 2, 3, 4});

inline constexpr std::array<int, 3> kDefaultTopN = {1, 3, 5};

// Smallest N such that the metric's best model is among the reference's N
// best. If several models tie for the metric's best score, the one placed
// worst by the reference is used. Reference ties count in favour of the
// item: its position is one plus the number of strictly better items.
std::optional<int> TopNHit(const Ranking &metric, const Ranking &reference,
                           std::span<const int> n_set = kDefaultTopN);

struct AnovaResult {
  double f_stat = 0.0;
  std::size_t df_between = 0;
  std::size_t df_within = 0;
  double ss_between = 0.0;
  double ss_within = 0.0;
  double p_value = 1.0;
};

// Throws Error with fewer than two groups or a group with fewer than two
// samples, UndefinedError when every group has zero variance.
AnovaResult AnovaSingleFactor(const std::vector<std::vector<double>> &groups);

}  // namespace htrqe

#endif  // HTRQE_STATS_H_
