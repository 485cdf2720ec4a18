// digest.h
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

#ifndef HTRQE_DIGEST_H_
#define HTRQE_DIGEST_H_

#include <memory>
#include <span>
#include <string>
#include <string_view>

namespace htrqe {

// Incremental SHA-256, rendered as "sha256:<hex>".
class Sha256 {
 public:
  Sha256();
  ~Sha256();
  Sha256(const Sha256 &) = delete;
  Sha256 &operator=(const Sha256 &) = delete;

  Sha256 &Update(std::string_view bytes);
  std::string HexDigest();

 private:
  struct State;
  std::unique_ptr<State> state_;
};

std::string DigestOf(std::string_view bytes);

// Digest of a line sequence; each line is terminated by '\n'.
std::string DigestOfLines(std::span<const std::string> lines);

}  // namespace htrqe

#endif  // HTRQE_DIGEST_H_
