// lexmetrics.h
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
// Lexicon-based quality metrics. Both ratios count hypothesis occurrences,
// not types: a token that appears twice and is in the lexicon contributes two
// hits.

#ifndef HTRQE_LEXMETRICS_H_
#define HTRQE_LEXMETRICS_H_

#include <cstddef>
#include <istream>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "htrqe/textprep.h"

namespace htrqe {

struct Lexicon {
  std::set<std::string, std::less<>> types;
  std::string built_from;  // digest of the reference token stream
  std::string prep_digest;

  bool Contains(std::string_view token) const {
    return types.find(token) != types.end();
  }
};

// How character n-grams are cut from a tokenized text.
enum class GramExtraction {
  // Each token is padded with boundary markers and cut separately.
  kWithinToken,
  // Each sentence's char stream (tokens joined by one space) is padded and cut
  // as a whole, so grams may span token boundaries.
  kCrossToken,
};

inline constexpr char32_t kGramBeginMarker = U'⟨';  // ⟨
inline constexpr char32_t kGramEndMarker = U'⟩';    // ⟩
inline constexpr int kDefaultMaxGramOrder = 7;

std::string_view GramExtractionName(GramExtraction extraction);
GramExtraction ParseGramExtraction(std::string_view name);

struct NGramSet {
  int order = 0;
  GramExtraction extraction = GramExtraction::kWithinToken;
  std::unordered_set<std::string> grams;
  std::string built_from;
  std::string prep_digest;

  bool Contains(const std::string &gram) const { return grams.contains(gram); }
};

struct RatioScore {
  std::string metric_id;
  std::size_t hits = 0;
  std::size_t total = 0;
  double value = 0.0;
};

// Throws UndefinedError on an empty reference.
Lexicon BuildLexicon(const TokenizedText &ref);

// A unit of text is padded with k begin and k end markers, where
// k = max(1, ceil((n - length) / 2)), so that every unit yields at least one
// gram of order n. Order 1 is never padded.
std::vector<std::string> PaddedCharNGrams(std::string_view unit, int n);

// All gram occurrences of `text`, in text order.
std::vector<std::string> ExtractCharNGrams(const TokenizedText &text, int n,
                                           GramExtraction extraction);

// Throws Error if n < 1 or n > max_order, UndefinedError on empty reference.
NGramSet BuildNGramSet(const TokenizedText &ref, int n,
                       GramExtraction extraction = GramExtraction::kWithinToken,
                       int max_order = kDefaultMaxGramOrder);

std::string TokenRatioId();
std::string NGramRatioId(int n, GramExtraction extraction);

// hits / total. Throws UndefinedError when the hypothesis has no tokens or the
// lexicon is empty.
RatioScore TokenRatio(const TokenizedText &hyp, const Lexicon &lex);

RatioScore NGramRatio(const TokenizedText &hyp, const NGramSet &gs);
RatioScore NGramRatio(std::span<const std::string> hyp_grams,
                      const NGramSet &gs);

// Persistence: a JSON header line followed by the entries, sorted bytewise,
// one per line.
void WriteLexicon(std::ostream &out, const Lexicon &lex);
Lexicon ReadLexicon(std::istream &in);
void WriteNGramSet(std::ostream &out, const NGramSet &gs);
NGramSet ReadNGramSet(std::istream &in);

}  // namespace htrqe

#endif  // HTRQE_LEXMETRICS_H_
