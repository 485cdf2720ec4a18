// report_test.cc
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

#include <string>
#include <vector>

#include <gmock/gmock.h>
#include <gtest/gtest.h>

#include "htrqe/report.h"
#include "unit/study_fixture.h"

namespace htrqe {
namespace {

using ::testing::HasSubstr;

const nlohmann::json &Report() {
  static const nlohmann::json report = [] {
    const StudyResources res = testing::MakeResources();
    const auto series =
        CorruptSeries(testing::TestLines(), {0.0, 0.04, 0.1, 0.2, 0.3}, 2, res.prep, "gen");
    return StudyToJson(RunStudy(res, testing::Outputs(series),
                                GroundTruth{testing::TestLines(), CerOptions()}));
  }();
  return report;
}

TEST(ReportJsonTest, Shape) {
  const nlohmann::json &j = Report();
  EXPECT_EQ(j.at("format"), kReportFormat);
  EXPECT_EQ(j.at("test_set_id"), "gen");
  EXPECT_EQ(j.at("models").size(), 5u);
  EXPECT_EQ(j.at("metrics").size(), 5u);
  for (const auto &m : j.at("metrics")) {
    EXPECT_EQ(m.at("cells").size(), 5u);
    EXPECT_TRUE(m.at("analysis").contains("spearman"));
    EXPECT_TRUE(m.at("analysis").contains("fit"));
  }
  EXPECT_EQ(j.at("summary").at("failed_cells"), 0);
  EXPECT_TRUE(j.at("provenance").contains("prep_digest"));
  EXPECT_EQ(j.at("reference").at("cer").size(), 5u);
}

TEST(ReportJsonTest, DumpIsStable) {
  const std::string text = DumpReport(Report());
  EXPECT_EQ(text.back(), '\n');
  EXPECT_EQ(DumpReport(nlohmann::json::parse(text)), text);
}

TEST(RenderTablesTest, ListsEveryMetricAndTestSet) {
  const std::string tables = RenderTables({Report()});
  EXPECT_THAT(tables, HasSubstr("gen"));
  for (const auto &m : Report().at("metrics")) {
    EXPECT_THAT(tables, HasSubstr(m.at("label").get<std::string>()));
  }
  EXPECT_THAT(tables, HasSubstr("cer_0.300"));
}

TEST(RenderTablesTest, NegativeAdjustedR2IsPrinted) {
  nlohmann::json j = Report();
  auto &best = j["metrics"][0]["analysis"]["fit"]["best"];
  best["adjusted_r2"] = -0.375;
  best["degree"] = 2;
  EXPECT_THAT(RenderTables({j}), HasSubstr("-0.38^2"));
}

TEST(RenderTablesTest, SeveralReportsBecomeColumns) {
  nlohmann::json other = Report();
  other["test_set_id"] = "second";
  const std::string tables = RenderTables({Report(), other});
  EXPECT_THAT(tables, HasSubstr("gen"));
  EXPECT_THAT(tables, HasSubstr("second"));
}

TEST(RenderTablesTest, RejectsForeignFormat) {
  nlohmann::json j = Report();
  j["format"] = "something/else";
  EXPECT_THROW(RenderTables({j}), Error);
  EXPECT_THROW(RenderTables({nlohmann::json::object()}), Error);
}

}  // namespace
}  // namespace htrqe
