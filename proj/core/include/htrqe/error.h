// error.h
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
// Exception hierarchy shared by all htrqe modules.

#ifndef HTRQE_ERROR_H_
#define HTRQE_ERROR_H_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace htrqe {

// Base class for every error raised on bad data or bad arguments.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string &message) : std::runtime_error(message) {}
};

// Input text is not valid UTF-8.
class EncodingError : public Error {
 public:
  EncodingError(const std::string &message, std::size_t byte_offset)
      : Error(message), byte_offset_(byte_offset) {}

  std::size_t byte_offset() const { return byte_offset_; }

 private:
  std::size_t byte_offset_;
};

// A quantity is mathematically undefined for the given input (empty text,
// zero variance, constant predictor, ...).
class UndefinedError : public Error {
 public:
  using Error::Error;
};

}  // namespace htrqe

#endif  // HTRQE_ERROR_H_
