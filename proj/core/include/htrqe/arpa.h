// arpa.h
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
// ARPA back-off language model files.
//
//   \data\ (header)
//   ngram 1=<count>
//   ...
//
//   \1-grams:
//   <log10 prob>\t<w1>[\t<log10 backoff>]
//   ...
//
//   \end\ (trailer)
//
// Lines before \data\ are ignored by other toolkits; WriteArpa uses them to
// record estimator metadata as "# key value" lines. Entries are written in
// bytewise order of their words so that output is deterministic.

#ifndef HTRQE_ARPA_H_
#define HTRQE_ARPA_H_

#include <cstddef>
#include <filesystem>
#include <istream>
#include <ostream>
#include <string>

#include "htrqe/error.h"
#include "htrqe/ngramlm.h"

namespace htrqe {

class ArpaParseError : public Error {
 public:
  ArpaParseError(const std::string &message, std::size_t line)
      : Error("ARPA line " + std::to_string(line) + ": " + message), line_(line) {}

  // 1-based; 0 when the error concerns the end of input.
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

void WriteArpa(std::ostream &out, const NGramModel &model);
std::string WriteArpaString(const NGramModel &model);
void WriteArpaFile(const std::filesystem::path &path, const NGramModel &model);

NGramModel ReadArpa(std::istream &in);
NGramModel ReadArpaString(const std::string &text);
NGramModel ReadArpaFile(const std::filesystem::path &path);

}  // namespace htrqe

#endif  // HTRQE_ARPA_H_
