// corrupt.cc
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

#include "htrqe/corrupt.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "htrqe/error.h"
#include "htrqe/unicode.h"

namespace htrqe {
namespace {

constexpr int kMaxTopUpRounds = 200;

enum class Edit { kSubstitute, kInsert, kDelete };

// Distribution-free mappings keep the output identical across standard
// library implementations.
class Random {
 public:
  explicit Random(std::uint64_t seed) : engine_(seed) {}

  std::size_t Below(std::size_t n) { return static_cast<std::size_t>(engine_() % n); }
  double Unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 engine_;
};

struct Position {
  std::size_t line;
  std::size_t offset;
};

class Corrupter {
 public:
  Corrupter(const CorruptionSpec &spec, std::u32string charset)
      : random_(spec.seed), charset_(std::move(charset)) {
    const double total = spec.substitution_weight + spec.insertion_weight + spec.deletion_weight;
    p_sub_ = spec.substitution_weight / total;
    p_ins_ = spec.insertion_weight / total;
  }

  // Applies `count` edits at i.i.d. uniform positions over all characters.
  void Apply(std::vector<std::u32string> &lines, std::size_t count) {
    std::vector<std::size_t> starts;
    std::size_t total = 0;
    for (const auto &line : lines) {
      starts.push_back(total);
      total += line.size();
    }
    if (total == 0) return;
    // edits[line] holds (offset, edit) pairs.
    std::vector<std::vector<std::pair<std::size_t, Edit>>> edits(lines.size());
    for (std::size_t e = 0; e < count; ++e) {
      const std::size_t pos = random_.Below(total);
      const auto it = std::upper_bound(starts.begin(), starts.end(), pos);
      const auto line = static_cast<std::size_t>(it - starts.begin()) - 1;
      edits[line].emplace_back(pos - starts[line], PickEdit());
    }
    for (std::size_t l = 0; l < lines.size(); ++l) {
      if (edits[l].empty()) continue;
      std::stable_sort(edits[l].begin(), edits[l].end(),
                       [](const auto &a, const auto &b) { return a.first < b.first; });
      std::u32string out;
      out.reserve(lines[l].size() + edits[l].size());
      std::size_t k = 0;
      for (std::size_t i = 0; i < lines[l].size(); ++i) {
        char32_t c = lines[l][i];
        bool deleted = false;
        for (; k < edits[l].size() && edits[l][k].first == i; ++k) {
          switch (edits[l][k].second) {
            case Edit::kInsert:
              out.push_back(charset_[random_.Below(charset_.size())]);
              break;
            case Edit::kSubstitute:
              if (!deleted) c = Different(c);
              break;
            case Edit::kDelete:
              deleted = true;
              break;
          }
        }
        if (!deleted) out.push_back(c);
      }
      lines[l] = std::move(out);
    }
  }

 private:
  Edit PickEdit() {
    const double u = random_.Unit();
    if (u < p_sub_) return Edit::kSubstitute;
    if (u < p_sub_ + p_ins_) return Edit::kInsert;
    return Edit::kDelete;
  }

  char32_t Different(char32_t c) {
    const auto it = std::find(charset_.begin(), charset_.end(), c);
    if (it == charset_.end()) return charset_[random_.Below(charset_.size())];
    const auto self = static_cast<std::size_t>(it - charset_.begin());
    const std::size_t pick = random_.Below(charset_.size() - 1);
    return charset_[pick >= self ? pick + 1 : pick];
  }

  Random random_;
  std::u32string charset_;
  double p_sub_ = 0.0;
  double p_ins_ = 0.0;
};

std::vector<std::string> EncodeLines(const std::vector<std::u32string> &lines) {
  std::vector<std::string> out;
  out.reserve(lines.size());
  for (const auto &line : lines) out.push_back(unicode::Encode(line));
  return out;
}

}  // namespace

void CorruptionSpec::Validate() const {
  if (!(target_cer >= 0.0 && target_cer < 1.0)) {
    throw Error("target CER must lie in [0, 1)");
  }
  if (substitution_weight < 0.0 || insertion_weight < 0.0 || deletion_weight < 0.0) {
    throw Error("corruption weights must be non-negative");
  }
  if (!(substitution_weight + insertion_weight + deletion_weight > 0.0)) {
    throw Error("corruption weights must not all be zero");
  }
}

nlohmann::json CorruptionSpec::ToJson() const {
  const double total = substitution_weight + insertion_weight + deletion_weight;
  return {{"target_cer", target_cer},
          {"substitution", substitution_weight / total},
          {"insertion", insertion_weight / total},
          {"deletion", deletion_weight / total},
          {"seed", seed},
          {"charset", unicode::Encode(charset)}};
}

CorruptionResult Corrupt(const std::vector<std::string> &lines, const CorruptionSpec &spec) {
  spec.Validate();
  std::vector<std::u32string> text;
  text.reserve(lines.size());
  std::set<char32_t> seen;
  for (const auto &line : lines) {
    text.push_back(unicode::Decode(unicode::ToNfc(line)));
    for (char32_t c : text.back()) {
      if (!unicode::IsWhitespace(c)) seen.insert(c);
    }
  }
  if (seen.empty()) throw Error("cannot corrupt an empty text");

  std::u32string charset = spec.charset;
  if (charset.empty()) charset.assign(seen.begin(), seen.end());
  std::sort(charset.begin(), charset.end());
  charset.erase(std::unique(charset.begin(), charset.end()), charset.end());
  if (spec.substitution_weight > 0.0 && charset.size() < 2) {
    throw Error("substitutions need at least two characters in the charset");
  }

  CorruptionResult result;
  const std::vector<std::string> original = EncodeLines(text);
  result.realized = AlignedCer(original, original);
  if (spec.target_cer == 0.0) {
    result.lines = original;
    return result;
  }
  const std::size_t ref_len = result.realized.ref_len;
  const auto wanted = static_cast<std::size_t>(
      std::llround(spec.target_cer * static_cast<double>(ref_len)));

  // Each edit changes the distance by at most one, so adding exactly the
  // current shortfall can never overshoot the target.
  Corrupter corrupter(spec, charset);
  std::size_t distance = 0;
  for (int round = 0; round < kMaxTopUpRounds && distance < wanted; ++round) {
    const std::size_t shortfall = wanted - distance;
    corrupter.Apply(text, shortfall);
    result.edits += shortfall;
    result.realized = AlignedCer(original, EncodeLines(text));
    distance = result.realized.distance;
  }
  result.lines = EncodeLines(text);
  return result;
}

std::uint64_t DeriveSeed(std::uint64_t seed, std::uint64_t index) {
  // SplitMix64 finalizer over the combined value.
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace htrqe
