// stats.cc
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

#include "htrqe/stats.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include <Eigen/Dense>

#include "htrqe/error.h"
#include "htrqe/special_functions.h"

namespace htrqe {
namespace {

constexpr double kCompareTolerance = 1e-12;

double Mean(std::span<const double> v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double SpearmanStatistic(std::span<const double> ra, std::span<const double> rb,
                         bool ties) {
  if (ties) return Pearson(ra, rb);
  double d2 = 0.0;
  for (std::size_t i = 0; i < ra.size(); ++i) d2 += (ra[i] - rb[i]) * (ra[i] - rb[i]);
  const auto n = static_cast<double>(ra.size());
  return 1.0 - 6.0 * d2 / (n * (n * n - 1.0));
}

double ExactPermutationP(std::span<const double> ra, std::vector<double> rb, double rho,
                         bool ties, Alternative alternative) {
  std::sort(rb.begin(), rb.end());
  std::size_t total = 0;
  std::size_t extreme = 0;
  do {
    const double r = SpearmanStatistic(ra, rb, ties);
    bool hit = false;
    switch (alternative) {
      case Alternative::kTwoSided:
        hit = std::fabs(r) >= std::fabs(rho) - kCompareTolerance;
        break;
      case Alternative::kGreater:
        hit = r >= rho - kCompareTolerance;
        break;
      case Alternative::kLess:
        hit = r <= rho + kCompareTolerance;
        break;
    }
    ++total;
    if (hit) ++extreme;
  } while (std::next_permutation(rb.begin(), rb.end()));
  // Tied rank values collapse duplicate arrangements; every distinct
  // arrangement of a multiset is equally likely, so the ratio is unchanged.
  return static_cast<double>(extreme) / static_cast<double>(total);
}

double TApproximationP(double rho, std::size_t n, Alternative alternative) {
  const double df = static_cast<double>(n) - 2.0;
  double t;
  if (1.0 - rho * rho <= 0.0) {
    t = rho > 0 ? std::numeric_limits<double>::infinity()
                : -std::numeric_limits<double>::infinity();
  } else {
    t = rho * std::sqrt(df / (1.0 - rho * rho));
  }
  switch (alternative) {
    case Alternative::kTwoSided:
      return std::min(1.0, 2.0 * StudentTSurvival(std::fabs(t), df));
    case Alternative::kGreater:
      return StudentTSurvival(t, df);
    case Alternative::kLess:
      return StudentTSurvival(-t, df);
  }
  return 1.0;
}

}  // namespace

std::string_view DirectionName(Direction direction) {
  return direction == Direction::kLowerIsBetter ? "lower_is_better" : "higher_is_better";
}

Direction ParseDirection(std::string_view name) {
  if (name == "lower_is_better" || name == "lower") return Direction::kLowerIsBetter;
  if (name == "higher_is_better" || name == "higher") return Direction::kHigherIsBetter;
  throw Error("unknown ranking direction '" + std::string(name) + "'");
}

std::vector<double> AverageRanks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
    const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

double Ranking::RankOf(const std::string &id) const {
  const auto it = ranks.find(id);
  if (it == ranks.end()) throw Error("no item '" + id + "' in ranking");
  return it->second;
}

std::size_t Ranking::PositionOf(const std::string &id) const {
  const double rank = RankOf(id);
  std::size_t better = 0;
  for (const auto &[other, r] : ranks) {
    if (r < rank) ++better;
  }
  return better + 1;
}

std::vector<std::string> Ranking::Ordered() const {
  std::vector<std::string> ids;
  ids.reserve(items.size());
  for (const auto &item : items) ids.push_back(item.first);
  std::stable_sort(ids.begin(), ids.end(), [this](const auto &a, const auto &b) {
    return ranks.at(a) < ranks.at(b);
  });
  return ids;
}

Ranking Rank(std::vector<std::pair<std::string, double>> scores, Direction direction) {
  if (scores.empty()) throw Error("cannot rank an empty list");
  std::vector<double> keys;
  keys.reserve(scores.size());
  for (const auto &[id, score] : scores) {
    if (std::isnan(score)) throw Error("score of '" + id + "' is NaN");
    if (!std::isfinite(score)) throw Error("score of '" + id + "' is not finite");
    keys.push_back(direction == Direction::kLowerIsBetter ? score : -score);
  }
  const auto ranks = AverageRanks(keys);
  Ranking ranking;
  ranking.direction = direction;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (!ranking.ranks.emplace(scores[i].first, ranks[i]).second) {
      throw Error("duplicate id '" + scores[i].first + "' in ranking");
    }
  }
  ranking.items = std::move(scores);
  return ranking;
}

double Pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw Error("Pearson correlation needs equal-length vectors");
  if (x.empty()) throw UndefinedError("Pearson correlation of empty vectors");
  const double mx = Mean(x);
  const double my = Mean(y);
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) throw UndefinedError("correlation with a constant vector");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::string_view AlternativeName(Alternative alternative) {
  switch (alternative) {
    case Alternative::kTwoSided:
      return "two-sided";
    case Alternative::kGreater:
      return "greater";
    case Alternative::kLess:
      return "less";
  }
  return "two-sided";
}

Alternative ParseAlternative(std::string_view name) {
  if (name == "two-sided") return Alternative::kTwoSided;
  if (name == "greater") return Alternative::kGreater;
  if (name == "less") return Alternative::kLess;
  throw Error("unknown alternative '" + std::string(name) + "'");
}

std::optional<double> SignificanceLevel(double p_value) {
  std::optional<double> level;
  for (double alpha : kSignificanceLevels) {
    if (p_value <= alpha) level = alpha;
  }
  return level;
}

RankCorrelation Spearman(const Ranking &a, const Ranking &b, Alternative alternative) {
  std::set<std::string> only_a;
  std::set<std::string> only_b;
  for (const auto &[id, r] : a.ranks) {
    if (!b.ranks.contains(id)) only_a.insert(id);
  }
  for (const auto &[id, r] : b.ranks) {
    if (!a.ranks.contains(id)) only_b.insert(id);
  }
  if (!only_a.empty() || !only_b.empty()) {
    std::string message = "rankings cover different items:";
    for (const auto &id : only_a) message += " +" + id;
    for (const auto &id : only_b) message += " -" + id;
    throw Error(message);
  }
  const std::size_t n = a.ranks.size();
  if (n < 3) throw UndefinedError("Spearman correlation needs n >= 3");

  std::vector<double> ra;
  std::vector<double> rb;
  ra.reserve(n);
  rb.reserve(n);
  for (const auto &[id, r] : a.ranks) {
    ra.push_back(r);
    rb.push_back(b.ranks.at(id));
  }
  auto has_ties = [](std::vector<double> r) {
    std::sort(r.begin(), r.end());
    return std::adjacent_find(r.begin(), r.end()) != r.end();
  };
  RankCorrelation result;
  result.n = n;
  result.alternative = alternative;
  result.tie_fallback = has_ties(ra) || has_ties(rb);
  for (std::size_t i = 0; i < n; ++i) result.d_squared_sum += (ra[i] - rb[i]) * (ra[i] - rb[i]);
  result.rho = SpearmanStatistic(ra, rb, result.tie_fallback);
  if (n <= kExactPermutationMaxN) {
    result.p_method = "exact-permutation";
    result.p_value = ExactPermutationP(ra, rb, result.rho, result.tie_fallback, alternative);
  } else {
    result.p_method = "t-approximation";
    result.p_value = TApproximationP(result.rho, n, alternative);
  }
  result.significance_level = SignificanceLevel(result.p_value);
  return result;
}

double RegressionFit::Predict(double x) const {
  double y = 0.0;
  for (auto it = coefficients.rbegin(); it != coefficients.rend(); ++it) y = y * x + *it;
  return y;
}

RegressionFit FitPolynomial(std::span<const double> xs, std::span<const double> ys,
                            int degree) {
  if (xs.size() != ys.size()) throw Error("regression needs equal-length x and y");
  if (degree < 1) throw Error("polynomial degree must be >= 1");
  const std::size_t n = xs.size();
  const auto d = static_cast<std::size_t>(degree);
  if (n <= d + 1) {
    throw Error("degree " + std::to_string(degree) + " fit needs more than " +
                std::to_string(d + 1) + " samples, got " + std::to_string(n));
  }
  const double mx = Mean(xs);
  double scale = 0.0;
  for (double x : xs) scale = std::max(scale, std::fabs(x - mx));
  if (scale == 0.0) throw UndefinedError("predictor is constant");
  const double my = Mean(ys);
  double ss_tot = 0.0;
  for (double y : ys) ss_tot += (y - my) * (y - my);
  if (ss_tot == 0.0) throw UndefinedError("dependent variable is constant");

  Eigen::MatrixXd design(n, d + 1);
  Eigen::VectorXd target(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double z = (xs[i] - mx) / scale;
    double power = 1.0;
    for (std::size_t k = 0; k <= d; ++k) {
      design(i, k) = power;
      power *= z;
    }
    target(i) = ys[i];
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  if (static_cast<std::size_t>(qr.rank()) < d + 1) {
    throw UndefinedError("rank-deficient design for degree " + std::to_string(degree));
  }
  const Eigen::VectorXd beta = qr.solve(target);
  const Eigen::VectorXd residual = target - design * beta;
  const double ss_res = residual.squaredNorm();

  // Expand sum_k beta_k ((x - mx) / scale)^k into powers of x.
  RegressionFit fit;
  fit.degree = degree;
  fit.n = n;
  fit.coefficients.assign(d + 1, 0.0);
  for (std::size_t k = 0; k <= d; ++k) {
    const double c = beta(static_cast<Eigen::Index>(k)) / std::pow(scale, static_cast<double>(k));
    double binom = 1.0;
    for (std::size_t j = 0; j <= k; ++j) {
      // binom = C(k, j)
      fit.coefficients[j] += c * binom * std::pow(-mx, static_cast<double>(k - j));
      binom = binom * static_cast<double>(k - j) / static_cast<double>(j + 1);
    }
  }
  fit.r2 = 1.0 - ss_res / ss_tot;
  const auto nn = static_cast<double>(n);
  fit.adjusted_r2 = 1.0 - (1.0 - fit.r2) * (nn - 1.0) / (nn - static_cast<double>(d) - 1.0);
  return fit;
}

PolyfitResult PolyfitAdjusted(std::span<const double> xs, std::span<const double> ys,
                              std::vector<int> degrees) {
  if (degrees.empty()) throw Error("no polynomial degrees requested");
  std::sort(degrees.begin(), degrees.end());
  degrees.erase(std::unique(degrees.begin(), degrees.end()), degrees.end());
  PolyfitResult result;
  for (int degree : degrees) {
    result.fits.push_back(FitPolynomial(xs, ys, degree));
    if (result.fits.size() == 1 ||
        result.fits.back().adjusted_r2 > result.best.adjusted_r2) {
      result.best = result.fits.back();
    }
  }
  return result;
}

std::optional<int> TopNHit(const Ranking &metric, const Ranking &reference,
                           std::span<const int> n_set) {
  if (metric.ranks.size() != reference.ranks.size()) {
    throw Error("rankings cover different items");
  }
  for (const auto &[id, r] : metric.ranks) {
    if (!reference.ranks.contains(id)) throw Error("rankings cover different items: " + id);
  }
  if (metric.ranks.empty()) throw Error("cannot evaluate Top-N on empty rankings");
  double best = std::numeric_limits<double>::infinity();
  for (const auto &[id, r] : metric.ranks) best = std::min(best, r);
  std::size_t position = 0;
  for (const auto &[id, r] : metric.ranks) {
    if (r == best) position = std::max(position, reference.PositionOf(id));
  }
  std::vector<int> sorted(n_set.begin(), n_set.end());
  std::sort(sorted.begin(), sorted.end());
  for (int n : sorted) {
    if (n >= 1 && position <= static_cast<std::size_t>(n)) return n;
  }
  return std::nullopt;
}

AnovaResult AnovaSingleFactor(const std::vector<std::vector<double>> &groups) {
  if (groups.size() < 2) throw Error("ANOVA needs at least two groups");
  std::size_t total = 0;
  double grand = 0.0;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    if (groups[g].size() < 2) {
      throw Error("ANOVA group " + std::to_string(g) + " has fewer than two samples");
    }
    total += groups[g].size();
    grand += std::accumulate(groups[g].begin(), groups[g].end(), 0.0);
  }
  grand /= static_cast<double>(total);
  AnovaResult result;
  for (const auto &group : groups) {
    const double m = Mean(group);
    result.ss_between += static_cast<double>(group.size()) * (m - grand) * (m - grand);
    for (double v : group) result.ss_within += (v - m) * (v - m);
  }
  if (result.ss_within == 0.0) throw UndefinedError("zero within-group variance");
  result.df_between = groups.size() - 1;
  result.df_within = total - groups.size();
  const double ms_between = result.ss_between / static_cast<double>(result.df_between);
  const double ms_within = result.ss_within / static_cast<double>(result.df_within);
  result.f_stat = ms_between / ms_within;
  result.p_value = FSurvival(result.f_stat, static_cast<double>(result.df_between),
                             static_cast<double>(result.df_within));
  return result;
}

}  // namespace htrqe
