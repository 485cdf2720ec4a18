// lexmetrics.cc
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

#include "htrqe/lexmetrics.h"

#include <algorithm>

#include <nlohmann/json.hpp>

#include "htrqe/error.h"
#include "htrqe/io.h"
#include "htrqe/unicode.h"

namespace htrqe {

std::string_view GramExtractionName(GramExtraction extraction) {
  return extraction == GramExtraction::kWithinToken ? "within-token"
                                                    : "cross-token";
}

GramExtraction ParseGramExtraction(std::string_view name) {
  if (name == "within-token" || name == "within") {
    return GramExtraction::kWithinToken;
  }
  if (name == "cross-token" || name == "cross") return GramExtraction::kCrossToken;
  throw Error("unknown gram extraction '" + std::string(name) + "'");
}

Lexicon BuildLexicon(const TokenizedText &ref) {
  if (ref.tokens.empty()) throw UndefinedError("cannot build a lexicon from an empty reference");
  Lexicon lex;
  lex.types.insert(ref.tokens.begin(), ref.tokens.end());
  lex.built_from = ref.Digest();
  return lex;
}

std::vector<std::string> PaddedCharNGrams(std::string_view unit, int n) {
  if (n < 1) throw Error("n-gram order must be >= 1");
  std::u32string chars = unicode::Decode(unit);
  if (n > 1) {
    const auto length = static_cast<int>(chars.size());
    const int pad = std::max(1, (n - length + 1) / 2);
    chars.insert(chars.begin(), static_cast<std::size_t>(pad), kGramBeginMarker);
    chars.append(static_cast<std::size_t>(pad), kGramEndMarker);
  }
  std::vector<std::string> grams;
  const auto order = static_cast<std::size_t>(n);
  if (chars.size() < order) return grams;
  grams.reserve(chars.size() - order + 1);
  for (std::size_t i = 0; i + order <= chars.size(); ++i) {
    grams.push_back(unicode::Encode(std::u32string_view(chars).substr(i, order)));
  }
  return grams;
}

std::vector<std::string> ExtractCharNGrams(const TokenizedText &text, int n,
                                           GramExtraction extraction) {
  std::vector<std::string> grams;
  auto add = [&grams, n](std::string_view unit) {
    auto cut = PaddedCharNGrams(unit, n);
    grams.insert(grams.end(), std::make_move_iterator(cut.begin()),
                 std::make_move_iterator(cut.end()));
  };
  if (extraction == GramExtraction::kWithinToken) {
    for (const auto &token : text.tokens) add(token);
  } else {
    for (std::size_t i = 0; i < text.sentences.size(); ++i) {
      add(text.SentenceText(i));
    }
  }
  return grams;
}

NGramSet BuildNGramSet(const TokenizedText &ref, int n,
                       GramExtraction extraction, int max_order) {
  if (n < 1) throw Error("n-gram order must be >= 1, got " + std::to_string(n));
  if (n > max_order) {
    throw Error("n-gram order " + std::to_string(n) + " exceeds the maximum " +
                std::to_string(max_order));
  }
  if (ref.tokens.empty()) throw UndefinedError("cannot build n-grams from an empty reference");
  NGramSet gs;
  gs.order = n;
  gs.extraction = extraction;
  for (auto &gram : ExtractCharNGrams(ref, n, extraction)) {
    gs.grams.insert(std::move(gram));
  }
  gs.built_from = ref.Digest();
  return gs;
}

std::string TokenRatioId() { return "token_ratio"; }

std::string NGramRatioId(int n, GramExtraction extraction) {
  std::string id = std::to_string(n) + "gram_ratio";
  if (extraction == GramExtraction::kCrossToken) id += "_cross";
  return id;
}

RatioScore TokenRatio(const TokenizedText &hyp, const Lexicon &lex) {
  if (lex.types.empty()) throw UndefinedError("lexicon is empty");
  if (hyp.tokens.empty()) {
    throw UndefinedError("undefined ratio: hypothesis has no tokens");
  }
  RatioScore score;
  score.metric_id = TokenRatioId();
  score.total = hyp.tokens.size();
  for (const auto &token : hyp.tokens) {
    if (lex.Contains(token)) ++score.hits;
  }
  score.value = static_cast<double>(score.hits) / static_cast<double>(score.total);
  return score;
}

RatioScore NGramRatio(std::span<const std::string> hyp_grams,
                      const NGramSet &gs) {
  if (hyp_grams.empty()) {
    throw UndefinedError("undefined ratio: hypothesis yields no n-grams");
  }
  RatioScore score;
  score.metric_id = NGramRatioId(gs.order, gs.extraction);
  score.total = hyp_grams.size();
  for (const auto &gram : hyp_grams) {
    if (gs.Contains(gram)) ++score.hits;
  }
  score.value = static_cast<double>(score.hits) / static_cast<double>(score.total);
  return score;
}

RatioScore NGramRatio(const TokenizedText &hyp, const NGramSet &gs) {
  const auto grams = ExtractCharNGrams(hyp, gs.order, gs.extraction);
  return NGramRatio(grams, gs);
}

namespace {

template <typename Range>
void WriteSortedEntries(std::ostream &out, const nlohmann::json &header,
                        const Range &entries) {
  std::vector<std::string_view> sorted(entries.begin(), entries.end());
  std::sort(sorted.begin(), sorted.end());
  out << header.dump() << '\n';
  for (auto entry : sorted) out << entry << '\n';
}

std::pair<nlohmann::json, std::vector<std::string>> ReadEntries(
    std::istream &in, std::string_view expected_kind) {
  auto lines = ReadLines(in);
  if (lines.empty()) throw Error("missing header line");
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(lines.front());
  } catch (const nlohmann::json::exception &e) {
    throw Error(std::string("malformed header line: ") + e.what());
  }
  if (header.value("kind", std::string()) != expected_kind) {
    throw Error("expected a " + std::string(expected_kind) + " file");
  }
  lines.erase(lines.begin());
  const auto count = header.value("count", static_cast<std::size_t>(0));
  if (count != lines.size()) {
    throw Error("header announces " + std::to_string(count) +
                " entries but file holds " + std::to_string(lines.size()));
  }
  return {std::move(header), std::move(lines)};
}

}  // namespace

void WriteLexicon(std::ostream &out, const Lexicon &lex) {
  nlohmann::json header = {{"kind", "lexicon"},
                           {"order", 1},
                           {"count", lex.types.size()},
                           {"source_digest", lex.built_from},
                           {"prep_digest", lex.prep_digest}};
  WriteSortedEntries(out, header, lex.types);
}

Lexicon ReadLexicon(std::istream &in) {
  auto [header, entries] = ReadEntries(in, "lexicon");
  Lexicon lex;
  lex.built_from = header.value("source_digest", std::string());
  lex.prep_digest = header.value("prep_digest", std::string());
  lex.types.insert(entries.begin(), entries.end());
  if (lex.types.size() != entries.size()) throw Error("duplicate lexicon entries");
  return lex;
}

void WriteNGramSet(std::ostream &out, const NGramSet &gs) {
  nlohmann::json header = {{"kind", "ngrams"},
                           {"order", gs.order},
                           {"extraction", GramExtractionName(gs.extraction)},
                           {"count", gs.grams.size()},
                           {"source_digest", gs.built_from},
                           {"prep_digest", gs.prep_digest}};
  WriteSortedEntries(out, header, gs.grams);
}

NGramSet ReadNGramSet(std::istream &in) {
  auto [header, entries] = ReadEntries(in, "ngrams");
  NGramSet gs;
  gs.order = header.value("order", 0);
  if (gs.order < 1) throw Error("invalid n-gram order in header");
  gs.extraction =
      ParseGramExtraction(header.value("extraction", std::string("within-token")));
  gs.built_from = header.value("source_digest", std::string());
  gs.prep_digest = header.value("prep_digest", std::string());
  for (auto &entry : entries) {
    if (unicode::Length(entry) != static_cast<std::size_t>(gs.order)) {
      throw Error("entry '" + entry + "' does not have " +
                  std::to_string(gs.order) + " characters");
    }
    gs.grams.insert(std::move(entry));
  }
  return gs;
}

}  // namespace htrqe
