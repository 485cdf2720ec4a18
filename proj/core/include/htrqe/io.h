// io.h
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

#ifndef HTRQE_IO_H_
#define HTRQE_IO_H_

#include <filesystem>
#include <istream>
#include <string>
#include <string_view>
#include <vector>

#include "htrqe/error.h"

namespace htrqe {

// A file could not be opened, read or written.
class IoError : public Error {
 public:
  IoError(const std::string &message, std::filesystem::path path)
      : Error(message + ": " + path.string()), path_(std::move(path)) {}

  const std::filesystem::path &path() const { return path_; }

 private:
  std::filesystem::path path_;
};

// Splits on '\n'; a trailing '\r' is stripped from every line and a final
// newline does not produce an empty last line.
std::vector<std::string> ReadLines(std::istream &in);
std::vector<std::string> ReadLinesFromFile(const std::filesystem::path &path);

std::string ReadFile(const std::filesystem::path &path);
void WriteFile(const std::filesystem::path &path, std::string_view content);
void WriteLinesToFile(const std::filesystem::path &path,
                      const std::vector<std::string> &lines);

}  // namespace htrqe

#endif  // HTRQE_IO_H_
