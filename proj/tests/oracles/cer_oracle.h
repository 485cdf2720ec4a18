// cer_oracle.h
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
// Naive recursive Levenshtein distance, memoized only to keep the
// exhaustive sweep fast.

#ifndef HTRQE_TESTS_ORACLES_CER_ORACLE_H_
#define HTRQE_TESTS_ORACLES_CER_ORACLE_H_

#include <algorithm>
#include <string>
#include <utility>
#include <vector>

namespace htrqe::testing {

inline std::size_t NaiveDistance(const std::u32string &a, const std::u32string &b) {
  constexpr std::size_t kUnset = static_cast<std::size_t>(-1);
  const std::size_t width = b.size() + 1;
  std::vector<std::size_t> memo((a.size() + 1) * width, kUnset);
  auto rec = [&](auto &self, std::size_t i, std::size_t j) -> std::size_t {
    if (i == a.size()) return b.size() - j;
    if (j == b.size()) return a.size() - i;
    std::size_t &slot = memo[i * width + j];
    if (slot != kUnset) return slot;
    slot = std::min({self(self, i + 1, j) + 1, self(self, i, j + 1) + 1,
                     self(self, i + 1, j + 1) + (a[i] == b[j] ? 0 : 1)});
    return slot;
  };
  return rec(rec, 0, 0);
}

// Every string of length <= max_len over `alphabet`, shortest first.
inline std::vector<std::u32string> AllStrings(const std::u32string &alphabet,
                                              std::size_t max_len) {
  std::vector<std::u32string> out = {U""};
  std::size_t begin = 0;
  for (std::size_t len = 1; len <= max_len; ++len) {
    const std::size_t end = out.size();
    for (std::size_t i = begin; i < end; ++i) {
      for (char32_t c : alphabet) out.push_back(out[i] + c);
    }
    begin = end;
  }
  return out;
}

}  // namespace htrqe::testing

#endif  // HTRQE_TESTS_ORACLES_CER_ORACLE_H_
