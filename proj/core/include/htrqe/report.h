// report.h
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
// Study reports. The JSON form is the machine-readable record and contains
// no timestamps or host details, so equal inputs give byte-identical
// reports. The text form is rendered from the JSON form, one column per test
// set.

#ifndef HTRQE_REPORT_H_
#define HTRQE_REPORT_H_

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "htrqe/harness.h"

namespace htrqe {

inline constexpr std::string_view kReportFormat = "htrqe-study/1";

nlohmann::json StudyToJson(const RankingStudy &study);

// Pretty-printed with a trailing newline.
std::string DumpReport(const nlohmann::json &report);

// Adjusted R², rank correlation and Top-N tables over one or more reports,
// followed by a per-model score table for each report. Throws Error if a
// report does not have the expected format.
std::string RenderTables(const std::vector<nlohmann::json> &reports);

}  // namespace htrqe

#endif  // HTRQE_REPORT_H_
