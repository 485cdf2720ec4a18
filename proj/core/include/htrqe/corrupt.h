// corrupt.h
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
// Synthetic recognition errors: character substitutions, insertions and
// deletions at i.i.d. positions, driven to a target CER.

#ifndef HTRQE_CORRUPT_H_
#define HTRQE_CORRUPT_H_

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "htrqe/cer.h"

namespace htrqe {

struct CorruptionSpec {
  double target_cer = 0.0;
  double substitution_weight = 1.0 / 3.0;
  double insertion_weight = 1.0 / 3.0;
  double deletion_weight = 1.0 / 3.0;
  std::uint64_t seed = 0;
  // Characters used for substitutions and insertions. Empty means the
  // distinct non-whitespace characters of the input.
  std::u32string charset;

  // Throws Error unless 0 <= target_cer < 1 and the weights are non-negative
  // with a positive sum.
  void Validate() const;
  nlohmann::json ToJson() const;
};

struct CorruptionResult {
  std::vector<std::string> lines;
  CerResult realized;
  std::size_t edits = 0;
};

// Line structure is preserved. The realized CER is measured against the
// input with the CER module's default normalization; edits are added until
// it reaches the target. Throws Error on empty text.
CorruptionResult Corrupt(const std::vector<std::string> &lines, const CorruptionSpec &spec);

// Seed for the i-th member of a series.
std::uint64_t DeriveSeed(std::uint64_t seed, std::uint64_t index);

}  // namespace htrqe

#endif  // HTRQE_CORRUPT_H_
