// textprep.cc
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

#include "htrqe/textprep.h"

#include <algorithm>
#include <unordered_set>

#include "htrqe/digest.h"
#include "htrqe/error.h"
#include "htrqe/unicode.h"

namespace htrqe {

std::u32string NamedCharset(std::string_view name) {
  std::u32string chars;
  auto add_range = [&chars](char32_t lo, char32_t hi) {
    for (char32_t c = lo; c <= hi; ++c) chars.push_back(c);
  };
  if (name == "latin" || name == "latin-ext") {
    add_range(U'a', U'z');
    add_range(U'A', U'Z');
  } else {
    throw Error("unknown charset '" + std::string(name) +
                "' (expected latin or latin-ext)");
  }
  if (name == "latin-ext") {
    for (char32_t c = 0xC0; c <= 0xFF; ++c) {
      if (c != 0xD7 && c != 0xF7) chars.push_back(c);  // skip × and ÷
    }
    add_range(0x100, 0x17F);
  }
  add_range(U'0', U'9');
  for (char c : kDefaultPunctuation) chars.push_back(static_cast<char32_t>(c));
  std::sort(chars.begin(), chars.end());
  chars.erase(std::unique(chars.begin(), chars.end()), chars.end());
  return chars;
}

PrepConfig PrepConfig::WithCharset(std::string_view name) {
  PrepConfig cfg;
  cfg.charset_name = std::string(name);
  cfg.allowed_charset = NamedCharset(name);
  return cfg;
}

bool PrepConfig::Allows(char32_t c) const {
  return std::binary_search(allowed_charset.begin(), allowed_charset.end(), c);
}

void PrepConfig::Validate() const {
  if (allowed_charset.empty()) throw Error("allowed charset is empty");
  if (!std::is_sorted(allowed_charset.begin(), allowed_charset.end())) {
    throw Error("allowed charset must be sorted");
  }
}

nlohmann::json PrepConfig::ToJson() const {
  return {
      {"charset", charset_name},
      {"allowed_charset", unicode::Encode(allowed_charset)},
      {"lowercase", lowercase},
      {"dedup_scope", dedup_scope == DedupScope::kLine ? "line" : "document"},
      {"boilerplate_patterns", boilerplate_patterns},
      {"normalization", kNormalizationForm},
      {"punctuation_detached", true},
  };
}

PrepConfig PrepConfig::FromJson(const nlohmann::json &j) {
  PrepConfig cfg;
  cfg.charset_name = j.value("charset", std::string("latin"));
  if (j.contains("allowed_charset")) {
    cfg.allowed_charset =
        unicode::Decode(j.at("allowed_charset").get<std::string>());
    std::sort(cfg.allowed_charset.begin(), cfg.allowed_charset.end());
    cfg.allowed_charset.erase(
        std::unique(cfg.allowed_charset.begin(), cfg.allowed_charset.end()),
        cfg.allowed_charset.end());
  } else {
    cfg.allowed_charset = NamedCharset(cfg.charset_name);
  }
  cfg.lowercase = j.value("lowercase", true);
  const std::string scope = j.value("dedup_scope", std::string("line"));
  if (scope == "line") {
    cfg.dedup_scope = DedupScope::kLine;
  } else if (scope == "document") {
    cfg.dedup_scope = DedupScope::kDocument;
  } else {
    throw Error("unknown dedup scope '" + scope + "'");
  }
  cfg.boilerplate_patterns =
      j.value("boilerplate_patterns", std::vector<std::string>{});
  cfg.Validate();
  return cfg;
}

std::string PrepConfig::Digest() const { return DigestOf(ToJson().dump()); }

namespace {

enum class LineVerdict { kKeep, kBoilerplate, kCharset, kEmpty };

bool IsBlank(std::string_view line) {
  for (char32_t c : unicode::Decode(line)) {
    if (!unicode::IsWhitespace(c)) return false;
  }
  return true;
}

LineVerdict Judge(std::string_view line, const PrepConfig &cfg) {
  if (IsBlank(line)) return LineVerdict::kEmpty;
  for (const auto &pattern : cfg.boilerplate_patterns) {
    if (!pattern.empty() && line.find(pattern) != std::string_view::npos) {
      return LineVerdict::kBoilerplate;
    }
  }
  for (char32_t c : unicode::Decode(unicode::ToNfc(line))) {
    if (!unicode::IsWhitespace(c) && !cfg.Allows(c)) return LineVerdict::kCharset;
  }
  return LineVerdict::kKeep;
}

void CountVerdict(LineVerdict verdict, DropCounts &counts) {
  switch (verdict) {
    case LineVerdict::kBoilerplate: ++counts.boilerplate; break;
    case LineVerdict::kCharset: ++counts.charset; break;
    case LineVerdict::kEmpty: ++counts.empty; break;
    case LineVerdict::kKeep: break;
  }
}

void ValidateCorpus(const RawCorpus &corpus) {
  std::size_t offset = 0;
  for (std::size_t i = 0; i < corpus.lines.size(); ++i) {
    const std::size_t bad = unicode::FindInvalidUtf8(corpus.lines[i]);
    if (bad != unicode::kValidUtf8) {
      throw EncodingError("invalid UTF-8 in " +
                              (corpus.source_id.empty() ? std::string("input")
                                                        : corpus.source_id) +
                              " at line " + std::to_string(i + 1) + ", byte " +
                              std::to_string(bad + 1) + " (offset " +
                              std::to_string(offset + bad) + ")",
                          offset + bad);
    }
    offset += corpus.lines[i].size() + 1;
  }
}

}  // namespace

CleanResult CleanWithCounts(const RawCorpus &corpus, const PrepConfig &cfg) {
  cfg.Validate();
  ValidateCorpus(corpus);
  CleanResult result;
  result.corpus.source_id = corpus.source_id;
  auto &out = result.corpus.lines;

  if (cfg.dedup_scope == DedupScope::kLine) {
    std::unordered_set<std::string> seen;
    for (const auto &line : corpus.lines) {
      const LineVerdict verdict = Judge(line, cfg);
      if (verdict != LineVerdict::kKeep) {
        CountVerdict(verdict, result.dropped);
        continue;
      }
      if (!seen.insert(line).second) {
        ++result.dropped.duplicate;
        continue;
      }
      out.push_back(line);
    }
    return result;
  }

  // Document scope: blank lines delimit blocks.
  std::unordered_set<std::string> seen_blocks;
  std::vector<std::string> block;
  auto flush = [&]() {
    if (block.empty()) return;
    std::string key;
    for (const auto &line : block) {
      key += line;
      key += '\n';
    }
    if (!seen_blocks.insert(key).second) {
      result.dropped.duplicate += block.size();
    } else {
      if (!out.empty()) out.emplace_back();
      out.insert(out.end(), block.begin(), block.end());
    }
    block.clear();
  };
  for (const auto &line : corpus.lines) {
    const LineVerdict verdict = Judge(line, cfg);
    if (verdict == LineVerdict::kEmpty) {
      flush();
      continue;
    }
    if (verdict != LineVerdict::kKeep) {
      CountVerdict(verdict, result.dropped);
      continue;
    }
    block.push_back(line);
  }
  flush();
  return result;
}

RawCorpus Clean(const RawCorpus &corpus, const PrepConfig &cfg) {
  return CleanWithCounts(corpus, cfg).corpus;
}

std::span<const std::string> TokenizedText::Sentence(std::size_t i) const {
  const SentenceSpan &s = sentences.at(i);
  return std::span<const std::string>(tokens).subspan(s.begin, s.size());
}

std::string TokenizedText::CharStream() const {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i > 0) out.push_back(kTokenSeparator);
    out += tokens[i];
  }
  return out;
}

std::string TokenizedText::SentenceText(std::size_t i) const {
  std::string out;
  for (const auto &token : Sentence(i)) {
    if (!out.empty()) out.push_back(kTokenSeparator);
    out += token;
  }
  return out;
}

void TokenizedText::Validate() const {
  std::size_t expected_begin = 0;
  for (const auto &s : sentences) {
    if (s.begin != expected_begin || s.end <= s.begin) {
      throw Error("sentence spans must be non-empty, ordered and contiguous");
    }
    expected_begin = s.end;
  }
  if (expected_begin != tokens.size()) {
    throw Error("sentence spans do not cover all tokens");
  }
  for (const auto &token : tokens) {
    if (token.empty() || token.find(kTokenSeparator) != std::string::npos) {
      throw Error("token is empty or contains the separator");
    }
  }
}

std::string TokenizedText::Digest() const {
  Sha256 sha;
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    sha.Update(SentenceText(i));
    sha.Update("\n");
  }
  return sha.HexDigest();
}

TokenizedText TokenizedText::FromSentences(
    const std::vector<std::vector<std::string>> &sentences) {
  TokenizedText text;
  for (const auto &sentence : sentences) {
    if (sentence.empty()) continue;
    const std::size_t begin = text.tokens.size();
    text.tokens.insert(text.tokens.end(), sentence.begin(), sentence.end());
    text.sentences.push_back({begin, text.tokens.size()});
  }
  text.Validate();
  return text;
}

namespace {

bool IsSentenceFinal(std::string_view token) {
  return token == "." || token == "!" || token == "?";
}

void TokenizeInto(std::string_view raw_line, const PrepConfig &cfg,
                  TokenizedText &text) {
  std::string line = unicode::ToNfc(raw_line);
  if (cfg.lowercase) line = unicode::FoldCase(line);

  std::size_t sentence_begin = text.tokens.size();
  auto close_sentence = [&]() {
    if (text.tokens.size() > sentence_begin) {
      text.sentences.push_back({sentence_begin, text.tokens.size()});
      sentence_begin = text.tokens.size();
    }
  };
  std::string current;
  auto flush_token = [&]() {
    if (!current.empty()) text.tokens.push_back(std::move(current));
    current.clear();
  };

  for (char32_t c : unicode::Decode(line)) {
    if (unicode::IsWhitespace(c)) {
      flush_token();
    } else if (unicode::IsPunctuationOrSymbol(c)) {
      flush_token();
      text.tokens.push_back(unicode::Encode(c));
      if (IsSentenceFinal(text.tokens.back())) close_sentence();
    } else {
      current += unicode::Encode(c);
    }
  }
  flush_token();
  close_sentence();
}

}  // namespace

TokenizedText Tokenize(const RawCorpus &corpus, const PrepConfig &cfg) {
  ValidateCorpus(corpus);
  TokenizedText text;
  for (const auto &line : corpus.lines) TokenizeInto(line, cfg, text);
  return text;
}

TokenizedText TokenizeLine(std::string_view line, const PrepConfig &cfg) {
  unicode::ValidateUtf8(line);
  TokenizedText text;
  TokenizeInto(line, cfg, text);
  return text;
}

void Append(TokenizedText &a, const TokenizedText &b) {
  const std::size_t offset = a.tokens.size();
  a.tokens.insert(a.tokens.end(), b.tokens.begin(), b.tokens.end());
  for (const auto &s : b.sentences) {
    a.sentences.push_back({s.begin + offset, s.end + offset});
  }
}

nlohmann::json PrepManifest(const RawCorpus &input, const CleanResult &result,
                            const PrepConfig &cfg, bool tokenized) {
  return {
      {"source_id", input.source_id},
      {"config", cfg.ToJson()},
      {"config_digest", cfg.Digest()},
      {"input_digest", DigestOfLines(input.lines)},
      {"output_digest", DigestOfLines(result.corpus.lines)},
      {"steps",
       tokenized ? nlohmann::json{"boilerplate", "charset", "dedup", "tokenize",
                                  "sentence_split"}
                 : nlohmann::json{"boilerplate", "charset", "dedup"}},
      {"counts",
       {{"input_lines", input.lines.size()},
        {"retained_lines", result.corpus.lines.size()},
        {"dropped",
         {{"boilerplate", result.dropped.boilerplate},
          {"charset", result.dropped.charset},
          {"duplicate", result.dropped.duplicate},
          {"empty", result.dropped.empty}}}}},
  };
}

}  // namespace htrqe
