// report.cc
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

#include "htrqe/report.h"

#include <algorithm>
#include <charconv>
#include <functional>
#include <map>
#include <sstream>
#include <tuple>

#include "htrqe/error.h"

namespace htrqe {
namespace {

nlohmann::json RankingToJson(const Ranking &ranking) {
  std::vector<std::pair<std::string, double>> items = ranking.items;
  std::stable_sort(items.begin(), items.end(), [&](const auto &a, const auto &b) {
    const double ra = ranking.ranks.at(a.first);
    const double rb = ranking.ranks.at(b.first);
    return ra != rb ? ra < rb : a.first < b.first;
  });
  nlohmann::json out = nlohmann::json::array();
  for (const auto &[id, score] : items) {
    out.push_back({{"model_id", id}, {"score", score}, {"rank", ranking.ranks.at(id)}});
  }
  return out;
}

nlohmann::json FitToJson(const RegressionFit &fit) {
  return {{"degree", fit.degree},
          {"coefficients", fit.coefficients},
          {"r2", fit.r2},
          {"adjusted_r2", fit.adjusted_r2},
          {"n", fit.n}};
}

nlohmann::json AnalysisToJson(const MetricAnalysis &a) {
  nlohmann::json j = {{"valid_cells", a.valid_cells}};
  if (a.correlation) {
    const auto &c = *a.correlation;
    j["spearman"] = {{"rho", c.rho},
                     {"n", c.n},
                     {"d_squared_sum", c.d_squared_sum},
                     {"p_value", c.p_value},
                     {"p_method", c.p_method},
                     {"alternative", AlternativeName(c.alternative)},
                     {"tie_fallback", c.tie_fallback}};
    j["spearman"]["significance_level"] =
        c.significance_level ? nlohmann::json(*c.significance_level) : nlohmann::json();
  }
  if (a.fit) {
    nlohmann::json fits = nlohmann::json::array();
    for (const auto &f : a.fit->fits) fits.push_back(FitToJson(f));
    j["fit"] = {{"best", FitToJson(a.fit->best)}, {"fits", fits}};
  }
  if (a.top_n_evaluated) j["top_n"] = a.top_n ? nlohmann::json(*a.top_n) : nlohmann::json();
  if (!a.skipped.empty()) j["skipped"] = a.skipped;
  return j;
}

std::string Fixed(double value, int digits) {
  char buffer[64];
  auto [end, ec] =
      std::to_chars(buffer, buffer + sizeof buffer, value, std::chars_format::fixed, digits);
  if (ec != std::errc()) return "?";
  std::string s(buffer, end);
  if (s == "-0.00" || s == "-0.0000") s.erase(0, 1);
  return s;
}

std::string General(double value) {
  char buffer[64];
  auto [end, ec] =
      std::to_chars(buffer, buffer + sizeof buffer, value, std::chars_format::general, 6);
  if (ec != std::errc()) return "?";
  return std::string(buffer, end);
}

class TextTable {
 public:
  explicit TextTable(std::vector<std::string> header) { rows_.push_back(std::move(header)); }

  void AddRow(std::vector<std::string> row) { rows_.push_back(std::move(row)); }

  std::string Render() const {
    std::vector<std::size_t> width;
    for (const auto &row : rows_) {
      if (row.size() > width.size()) width.resize(row.size(), 0);
      for (std::size_t c = 0; c < row.size(); ++c) {
        width[c] = std::max(width[c], DisplayWidth(row[c]));
      }
    }
    std::string out;
    for (std::size_t r = 0; r < rows_.size(); ++r) {
      std::string line;
      for (std::size_t c = 0; c < width.size(); ++c) {
        const std::string cell = c < rows_[r].size() ? rows_[r][c] : "";
        const std::string pad(width[c] - DisplayWidth(cell), ' ');
        if (c > 0) line += "  ";
        line += c == 0 ? cell + pad : pad + cell;
      }
      while (!line.empty() && line.back() == ' ') line.pop_back();
      out += line + '\n';
      if (r == 0) {
        std::size_t total = 0;
        for (std::size_t c = 0; c < width.size(); ++c) total += width[c] + (c > 0 ? 2 : 0);
        out += std::string(total, '-') + '\n';
      }
    }
    return out;
  }

 private:
  static std::size_t DisplayWidth(const std::string &s) {
    std::size_t n = 0;
    for (unsigned char c : s) {
      if ((c & 0xC0) != 0x80) ++n;
    }
    return n;
  }

  std::vector<std::vector<std::string>> rows_;
};

int FamilyOrder(const std::string &family) {
  if (family == "pppl") return 0;
  if (family == "ppl") return 1;
  if (family == "token") return 2;
  if (family == "ngram") return 3;
  return 4;
}

std::string FamilyName(const std::string &family) {
  if (family == "pppl") return "PPPL";
  if (family == "ppl") return "PPL";
  if (family == "token") return "Token ratio";
  if (family == "ngram") return "Character n-grams";
  return family;
}

// Numeric part of ids such as "12gram_ratio" so that orders sort naturally.
int LeadingNumber(const std::string &id) {
  int n = 0;
  std::from_chars(id.data(), id.data() + id.size(), n);
  return n;
}

struct RowKey {
  int family_order;
  int number;
  std::string metric_id;
  bool operator<(const RowKey &o) const {
    return std::tie(family_order, number, metric_id) <
           std::tie(o.family_order, o.number, o.metric_id);
  }
};

struct RowInfo {
  std::string family;
  std::string label;
};

const nlohmann::json *FindMetric(const nlohmann::json &report, const std::string &id) {
  for (const auto &m : report.at("metrics")) {
    if (m.at("metric_id") == id) return &m;
  }
  return nullptr;
}

std::string RowTitle(const RowInfo &info, bool first_of_family) {
  std::string family = first_of_family ? FamilyName(info.family) : "";
  if (info.family == "token") return family;
  return family.empty() ? "  " + info.label : family + " / " + info.label;
}

bool IsNull(const nlohmann::json &j, const char *key) {
  return !j.contains(key) || j.at(key).is_null();
}

}  // namespace

nlohmann::json StudyToJson(const RankingStudy &study) {
  nlohmann::json j;
  j["format"] = kReportFormat;
  j["test_set_id"] = study.test_set_id;
  j["models"] = study.model_ids;
  if (study.reference_cers) {
    nlohmann::json cer = nlohmann::json::object();
    for (const auto &[id, r] : *study.reference_cers) cer[id] = CerResultToJson(r);
    j["reference"] = {{"cer", cer}};
    if (!study.reference_errors.empty()) j["reference"]["errors"] = study.reference_errors;
    j["reference"]["ranking"] = study.reference_ranking ? RankingToJson(*study.reference_ranking)
                                                        : nlohmann::json::array();
  } else {
    j["reference"] = nullptr;
  }
  nlohmann::json metrics = nlohmann::json::array();
  for (const auto &info : study.metrics) {
    nlohmann::json m = {{"metric_id", info.metric_id},
                        {"family", info.family},
                        {"label", info.label},
                        {"direction", DirectionName(info.direction)}};
    nlohmann::json cells = nlohmann::json::array();
    std::size_t failed = 0;
    for (const auto &[model, cell] : study.cells.at(info.metric_id)) {
      nlohmann::json c = {{"model_id", model}};
      if (cell.ok()) {
        c["value"] = *cell.value;
        if (!cell.detail.is_null()) c["detail"] = cell.detail;
      } else {
        c["error"] = cell.error;
        ++failed;
      }
      cells.push_back(c);
    }
    m["cells"] = cells;
    m["failed_cells"] = failed;
    const auto &analysis = study.analyses.at(info.metric_id);
    m["ranking"] = analysis.ranking ? RankingToJson(*analysis.ranking) : nlohmann::json::array();
    m["analysis"] = AnalysisToJson(analysis);
    metrics.push_back(m);
  }
  j["metrics"] = metrics;
  if (study.anova) {
    const auto &a = *study.anova;
    j["anova"] = {{"models", study.anova_models},
                  {"f_stat", a.f_stat},
                  {"df_between", a.df_between},
                  {"df_within", a.df_within},
                  {"ss_between", a.ss_between},
                  {"ss_within", a.ss_within},
                  {"p_value", a.p_value}};
  } else if (!study.anova_error.empty()) {
    j["anova"] = {{"models", study.anova_models}, {"error", study.anova_error}};
  } else {
    j["anova"] = nullptr;
  }
  j["summary"] = {{"failed_cells", study.FailedCells()},
                  {"metrics_failed_everywhere", study.MetricsFailedEverywhere()}};
  j["provenance"] = study.provenance;
  return j;
}

std::string DumpReport(const nlohmann::json &report) { return report.dump(2) + "\n"; }

std::string RenderTables(const std::vector<nlohmann::json> &reports) {
  if (reports.empty()) throw Error("no reports to render");
  std::map<RowKey, RowInfo> rows;
  std::vector<std::string> columns;
  for (const auto &report : reports) {
    if (!report.is_object() || report.value("format", std::string()) != kReportFormat) {
      throw Error("not an htrqe study report");
    }
    columns.push_back(report.at("test_set_id").get<std::string>());
    for (const auto &m : report.at("metrics")) {
      const std::string id = m.at("metric_id");
      const std::string family = m.at("family");
      rows[{FamilyOrder(family), LeadingNumber(id), id}] = {family, m.at("label")};
    }
  }

  auto build = [&](const std::string &title,
                   const std::function<std::string(const nlohmann::json &)> &cell) {
    std::vector<std::string> header = {title};
    header.insert(header.end(), columns.begin(), columns.end());
    TextTable table(header);
    std::string previous_family;
    for (const auto &[key, info] : rows) {
      std::vector<std::string> row = {RowTitle(info, info.family != previous_family)};
      previous_family = info.family;
      for (const auto &report : reports) {
        const nlohmann::json *m = FindMetric(report, key.metric_id);
        row.push_back(m == nullptr ? "" : cell(m->at("analysis")));
      }
      table.AddRow(row);
    }
    return table.Render();
  };

  std::ostringstream out;
  out << "Adjusted R^2 of CER on metric score (^d: polynomial degree)\n\n";
  out << build("Metric", [](const nlohmann::json &a) -> std::string {
    if (!a.contains("fit")) return "-";
    const auto &best = a.at("fit").at("best");
    return Fixed(best.at("adjusted_r2").get<double>(), 2) + "^" +
           std::to_string(best.at("degree").get<int>());
  });
  out << "\nSpearman rho against the CER ranking (in brackets: smallest significance "
         "level reached among 0.05, 0.025, 0.01, 0.005, 0.001)\n\n";
  out << build("Metric", [](const nlohmann::json &a) -> std::string {
    if (!a.contains("spearman")) return "-";
    const auto &s = a.at("spearman");
    std::string text = Fixed(s.at("rho").get<double>(), 2);
    if (!IsNull(s, "significance_level")) {
      text += " [" + General(s.at("significance_level").get<double>()) + "]";
    }
    return text;
  });
  out << "\nTop-N hit of the metric's best model (blank: outside every N)\n\n";
  out << build("Metric", [](const nlohmann::json &a) -> std::string {
    if (!a.contains("top_n")) return "-";
    return a.at("top_n").is_null() ? "" : std::to_string(a.at("top_n").get<int>());
  });

  for (const auto &report : reports) {
    out << "\nScores on " << report.at("test_set_id").get<std::string>() << "\n\n";
    std::vector<std::string> header = {"Model"};
    std::vector<std::string> metric_ids;
    for (const auto &[key, info] : rows) {
      if (FindMetric(report, key.metric_id) != nullptr) {
        metric_ids.push_back(key.metric_id);
        header.push_back(key.metric_id);
      }
    }
    const bool has_reference = !report.at("reference").is_null();
    if (has_reference) header.push_back("CER");
    TextTable table(header);
    for (const auto &model : report.at("models")) {
      std::vector<std::string> row = {model.get<std::string>()};
      for (const auto &id : metric_ids) {
        std::string text = "failed";
        for (const auto &c : FindMetric(report, id)->at("cells")) {
          if (c.at("model_id") == model && c.contains("value")) {
            text = Fixed(c.at("value").get<double>(), 4);
          }
        }
        row.push_back(text);
      }
      if (has_reference) {
        const auto &cer = report.at("reference").at("cer");
        row.push_back(cer.contains(model.get<std::string>())
                          ? Fixed(cer.at(model.get<std::string>()).at("cer").get<double>(), 4)
                          : "failed");
      }
      table.AddRow(row);
    }
    out << table.Render();
    if (report.contains("anova") && report.at("anova").is_object()) {
      const auto &a = report.at("anova");
      if (a.contains("p_value")) {
        out << "\nSingle-factor ANOVA on per-line CER of the " << a.at("models").size()
            << " best models: F(" << a.at("df_between").get<std::size_t>() << ", "
            << a.at("df_within").get<std::size_t>()
            << ") = " << Fixed(a.at("f_stat").get<double>(), 4)
            << ", p = " << Fixed(a.at("p_value").get<double>(), 4) << "\n";
      }
    }
  }
  return out.str();
}

}  // namespace htrqe
