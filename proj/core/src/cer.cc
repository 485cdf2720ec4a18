// cer.cc
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

#include "htrqe/cer.h"

#include <algorithm>
#include <limits>

#include "htrqe/error.h"
#include "htrqe/unicode.h"

namespace htrqe {
namespace {

// Distance restricted to alignments that stay within `band` cells of the
// diagonal. Exact whenever the true distance is <= band.
std::size_t BandedDistance(std::u32string_view a, std::u32string_view b,
                           std::size_t band) {
  constexpr std::size_t kInf = std::numeric_limits<std::size_t>::max() / 2;
  const std::size_t n = a.size();
  const std::size_t m = b.size();
  std::vector<std::size_t> prev(m + 2, kInf);
  std::vector<std::size_t> cur(m + 2, kInf);
  const std::size_t hi0 = std::min(m, band);
  for (std::size_t j = 0; j <= hi0; ++j) prev[j] = j;
  prev[hi0 + 1] = kInf;
  for (std::size_t i = 1; i <= n; ++i) {
    const std::size_t lo = i > band ? i - band : 0;
    const std::size_t hi = std::min(m, i + band);
    if (lo > 0) cur[lo - 1] = kInf;
    for (std::size_t j = lo; j <= hi; ++j) {
      if (j == 0) {
        cur[0] = i;
        continue;
      }
      const std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      const std::size_t del = prev[j] + 1;
      const std::size_t ins = cur[j - 1] + 1;
      cur[j] = std::min({sub, del, ins});
    }
    cur[hi + 1] = kInf;
    std::swap(prev, cur);
  }
  return prev[m];
}

std::string NormalizeLine(std::string_view line, const CerOptions &options) {
  std::string out = unicode::ToNfc(line);
  if (options.normalize_whitespace) out = unicode::CollapseWhitespace(out);
  if (options.case_fold) out = unicode::FoldCase(out);
  return out;
}

}  // namespace

nlohmann::json CerOptions::ToJson() const {
  return {{"normalization_form", "NFC"},
          {"normalize_whitespace", normalize_whitespace},
          {"case_fold", case_fold}};
}

std::u32string NormalizeForCer(std::string_view text, const CerOptions &options) {
  unicode::ValidateUtf8(text);
  std::string joined;
  bool first = true;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t stop = text.find('\n', start);
    if (stop == std::string_view::npos) stop = text.size();
    std::string_view line = text.substr(start, stop - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    std::string normalized = NormalizeLine(line, options);
    const bool skip = options.normalize_whitespace && normalized.empty();
    if (!skip) {
      if (!first) joined += '\n';
      joined += normalized;
      first = false;
    }
    if (stop == text.size()) break;
    start = stop + 1;
  }
  return unicode::Decode(joined);
}

std::size_t EditDistance(std::u32string_view a, std::u32string_view b) {
  std::size_t prefix = 0;
  while (prefix < a.size() && prefix < b.size() && a[prefix] == b[prefix]) ++prefix;
  a.remove_prefix(prefix);
  b.remove_prefix(prefix);
  while (!a.empty() && !b.empty() && a.back() == b.back()) {
    a.remove_suffix(1);
    b.remove_suffix(1);
  }
  if (a.empty()) return b.size();
  if (b.empty()) return a.size();
  if (a.size() < b.size()) std::swap(a, b);
  const std::size_t longest = a.size();
  std::size_t band = std::max<std::size_t>(1, a.size() - b.size());
  while (true) {
    const std::size_t d = BandedDistance(a, b, band);
    if (d <= band || band >= longest) return d;
    band *= 2;
  }
}

CerResult CharErrorRate(std::string_view ref, std::string_view hyp,
                        const CerOptions &options) {
  const std::u32string r = NormalizeForCer(ref, options);
  if (r.empty()) throw UndefinedError("CER is undefined for an empty reference");
  const std::u32string h = NormalizeForCer(hyp, options);
  CerResult result;
  result.distance = EditDistance(r, h);
  result.ref_len = r.size();
  result.cer = static_cast<double>(result.distance) / static_cast<double>(result.ref_len);
  return result;
}

std::vector<CerResult> PerPairCer(
    const std::vector<std::pair<std::string, std::string>> &pairs,
    const CerOptions &options) {
  if (pairs.empty()) throw Error("CER needs at least one reference/hypothesis pair");
  std::vector<CerResult> results;
  results.reserve(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    try {
      results.push_back(CharErrorRate(pairs[i].first, pairs[i].second, options));
    } catch (const UndefinedError &) {
      throw UndefinedError("pair " + std::to_string(i) + " has an empty reference");
    }
  }
  return results;
}

CerResult Aggregate(const std::vector<CerResult> &parts) {
  CerResult total;
  for (const auto &part : parts) {
    total.distance += part.distance;
    total.ref_len += part.ref_len;
  }
  if (total.ref_len == 0) throw UndefinedError("CER is undefined for an empty reference");
  total.cer = static_cast<double>(total.distance) / static_cast<double>(total.ref_len);
  return total;
}

CerResult CorpusCer(const std::vector<std::pair<std::string, std::string>> &pairs,
                    const CerOptions &options) {
  return Aggregate(PerPairCer(pairs, options));
}

CerResult AlignedCer(const std::vector<std::string> &ref,
                     const std::vector<std::string> &hyp,
                     const CerOptions &options) {
  if (ref.size() != hyp.size()) {
    std::string r;
    std::string h;
    for (const auto &line : ref) r.append(line).push_back('\n');
    for (const auto &line : hyp) h.append(line).push_back('\n');
    return CharErrorRate(r, h, options);
  }
  CerResult total;
  for (std::size_t i = 0; i < ref.size(); ++i) {
    const std::u32string r = NormalizeForCer(ref[i], options);
    const std::u32string h = NormalizeForCer(hyp[i], options);
    total.distance += EditDistance(r, h);
    total.ref_len += r.size();
  }
  if (total.ref_len == 0) throw UndefinedError("CER is undefined for an empty reference");
  total.cer = static_cast<double>(total.distance) / static_cast<double>(total.ref_len);
  return total;
}

std::vector<std::pair<std::string, std::string>> AlignLines(
    const std::vector<std::string> &ref, const std::vector<std::string> &hyp) {
  if (ref.size() != hyp.size()) {
    throw Error("reference has " + std::to_string(ref.size()) +
                " lines but hypothesis has " + std::to_string(hyp.size()));
  }
  std::vector<std::pair<std::string, std::string>> pairs;
  pairs.reserve(ref.size());
  for (std::size_t i = 0; i < ref.size(); ++i) pairs.emplace_back(ref[i], hyp[i]);
  return pairs;
}

nlohmann::json CerResultToJson(const CerResult &result) {
  return {{"distance", result.distance}, {"ref_len", result.ref_len}, {"cer", result.cer}};
}

}  // namespace htrqe
