// cer.h
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
// Character error rate: Levenshtein distance over code points divided by the
// reference length.

#ifndef HTRQE_CER_H_
#define HTRQE_CER_H_

#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

namespace htrqe {

struct CerOptions {
  // Trim every line and collapse inner whitespace runs to one space; blank
  // lines are dropped.
  bool normalize_whitespace = true;
  bool case_fold = false;

  nlohmann::json ToJson() const;
};

struct CerResult {
  std::size_t distance = 0;
  std::size_t ref_len = 0;
  double cer = 0.0;
};

// NFC, then the optional whitespace and case steps line by line; lines are
// joined with a single '\n'.
std::u32string NormalizeForCer(std::string_view text, const CerOptions &options = {});

// Unit-cost Levenshtein distance. Runs in O((d + 1) * min(|a|, |b|)) time.
std::size_t EditDistance(std::u32string_view a, std::u32string_view b);

// Throws UndefinedError if the normalized reference is empty.
CerResult CharErrorRate(std::string_view ref, std::string_view hyp,
                        const CerOptions &options = {});

// Micro-average: distances and reference lengths are summed over pairs.
// Throws UndefinedError naming the 0-based index of an empty reference, and
// Error on an empty pair list.
CerResult CorpusCer(const std::vector<std::pair<std::string, std::string>> &pairs,
                    const CerOptions &options = {});

// Per-pair results in input order, with the same errors as CorpusCer.
std::vector<CerResult> PerPairCer(
    const std::vector<std::pair<std::string, std::string>> &pairs,
    const CerOptions &options = {});

// Document CER over line-aligned texts: per-line distances and lengths are
// summed. Unlike CorpusCer, individual blank reference lines are allowed; only
// an entirely empty reference is an error. When the line counts differ the
// documents are compared as whole character streams.
CerResult AlignedCer(const std::vector<std::string> &ref,
                     const std::vector<std::string> &hyp,
                     const CerOptions &options = {});

CerResult Aggregate(const std::vector<CerResult> &parts);

// Pairs up two line lists; throws Error if their lengths differ.
std::vector<std::pair<std::string, std::string>> AlignLines(
    const std::vector<std::string> &ref, const std::vector<std::string> &hyp);

nlohmann::json CerResultToJson(const CerResult &result);

}  // namespace htrqe

#endif  // HTRQE_CER_H_
