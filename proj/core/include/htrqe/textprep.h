// textprep.h
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
// Corpus preprocessing: line filtering, deduplication, tokenization and
// sentence splitting. The same pipeline is applied to reference corpora and to
// recognition hypotheses so that both sides of every metric see identically
// normalized tokens.

#ifndef HTRQE_TEXTPREP_H_
#define HTRQE_TEXTPREP_H_

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace htrqe {

struct RawCorpus {
  std::vector<std::string> lines;
  std::string source_id;
};

enum class DedupScope { kLine, kDocument };

inline constexpr std::string_view kDefaultPunctuation = ".,;:!?'\"()-";
inline constexpr std::string_view kNormalizationForm = "NFC";

// Letters of a named alphabet plus digits plus kDefaultPunctuation.
// Known names: "latin" (ASCII letters), "latin-ext" (adds Latin-1 Supplement
// and Latin Extended-A letters). Throws Error for unknown names.
std::u32string NamedCharset(std::string_view name);

struct PrepConfig {
  std::string charset_name = "latin";
  // Sorted, unique code points. Whitespace is always allowed implicitly.
  std::u32string allowed_charset = NamedCharset("latin");
  bool lowercase = true;
  DedupScope dedup_scope = DedupScope::kLine;
  // Any line containing one of these literal substrings is dropped.
  std::vector<std::string> boilerplate_patterns;

  static PrepConfig WithCharset(std::string_view name);

  bool Allows(char32_t c) const;
  // Throws Error when an invariant is broken (empty charset).
  void Validate() const;

  nlohmann::json ToJson() const;
  static PrepConfig FromJson(const nlohmann::json &j);
  // Digest of the canonical JSON form; two configs that preprocess
  // identically have identical digests.
  std::string Digest() const;
};

struct DropCounts {
  std::size_t boilerplate = 0;
  std::size_t charset = 0;
  std::size_t duplicate = 0;
  std::size_t empty = 0;

  std::size_t total() const { return boilerplate + charset + duplicate + empty; }
};

struct CleanResult {
  RawCorpus corpus;
  DropCounts dropped;
};

// Drops boilerplate lines, then lines with characters outside the allowed
// charset, then duplicates. With DedupScope::kDocument, blank-line separated
// blocks are the deduplication unit and blank lines are kept as single block
// separators. Throws EncodingError at the first invalid byte.
CleanResult CleanWithCounts(const RawCorpus &corpus, const PrepConfig &cfg);
RawCorpus Clean(const RawCorpus &corpus, const PrepConfig &cfg);

struct SentenceSpan {
  std::size_t begin = 0;  // first token index
  std::size_t end = 0;    // one past the last token index

  std::size_t size() const { return end - begin; }
  bool operator==(const SentenceSpan &) const = default;
};

inline constexpr char kTokenSeparator = ' ';

struct TokenizedText {
  std::vector<std::string> tokens;
  std::vector<SentenceSpan> sentences;

  bool empty() const { return tokens.empty(); }
  std::span<const std::string> Sentence(std::size_t i) const;
  // Tokens joined by kTokenSeparator.
  std::string CharStream() const;
  std::string SentenceText(std::size_t i) const;
  // Checks the span invariants: non-empty, disjoint, ordered, covering.
  void Validate() const;
  // Digest of the token stream with sentence boundaries.
  std::string Digest() const;

  static TokenizedText FromSentences(
      const std::vector<std::vector<std::string>> &sentences);

  bool operator==(const TokenizedText &) const = default;
};

// Detaches every punctuation or symbol character into a standalone token,
// splits on whitespace and optionally case-folds. A sentence ends after ".",
// "!" or "?" and at every line end.
TokenizedText Tokenize(const RawCorpus &corpus, const PrepConfig &cfg);
TokenizedText TokenizeLine(std::string_view line, const PrepConfig &cfg);

// Concatenates `b` after `a`.
void Append(TokenizedText &a, const TokenizedText &b);

// Sidecar manifest describing one preprocessing run.
nlohmann::json PrepManifest(const RawCorpus &input, const CleanResult &result,
                            const PrepConfig &cfg, bool tokenized);

}  // namespace htrqe

#endif  // HTRQE_TEXTPREP_H_
