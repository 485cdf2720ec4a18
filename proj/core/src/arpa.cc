// arpa.cc
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

#include "htrqe/arpa.h"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>
#include <string_view>
#include <vector>

#include "htrqe/io.h"

namespace htrqe {
namespace {

constexpr std::string_view kMetaPrefix = "# htrqe ";

std::string FormatLog(double value) {
  char buffer[64];
  auto [end, ec] = std::to_chars(buffer, buffer + sizeof buffer, value,
                                 std::chars_format::general, 7);
  if (ec != std::errc()) throw Error("cannot format number");
  return std::string(buffer, end);
}

std::string FormatExact(double value) {
  char buffer[64];
  auto [end, ec] = std::to_chars(buffer, buffer + sizeof buffer, value);
  if (ec != std::errc()) throw Error("cannot format number");
  return std::string(buffer, end);
}

std::string_view Trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> SplitFields(std::string_view s) {
  std::vector<std::string_view> fields;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    if (i >= s.size()) break;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t') ++j;
    fields.push_back(s.substr(i, j - i));
    i = j;
  }
  return fields;
}

template <typename T>
bool ParseNumber(std::string_view s, T &value) {
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  return ec == std::errc() && ptr == s.data() + s.size();
}

std::string SectionName(int k) { return "\\" + std::to_string(k) + "-grams:"; }

}  // namespace

void WriteArpa(std::ostream &out, const NGramModel &model) {
  const ModelMetadata &meta = model.metadata();
  if (!meta.estimator.empty()) out << kMetaPrefix << "estimator=" << meta.estimator << '\n';
  if (!meta.source_digest.empty()) {
    out << kMetaPrefix << "source_digest=" << meta.source_digest << '\n';
  }
  if (!meta.prep_digest.empty()) {
    out << kMetaPrefix << "prep_digest=" << meta.prep_digest << '\n';
  }
  for (std::size_t k = 0; k < meta.discounts.size(); ++k) {
    const KnDiscount &d = meta.discounts[k];
    out << kMetaPrefix << "discount order=" << (k + 1) << " d1=" << FormatExact(d.d1)
        << " d2=" << FormatExact(d.d2) << " d3plus=" << FormatExact(d.d3plus)
        << " fallback=" << (d.fallback ? 1 : 0) << " n1=" << d.count_of_counts[0]
        << " n2=" << d.count_of_counts[1] << " n3=" << d.count_of_counts[2]
        << " n4=" << d.count_of_counts[3] << '\n';
  }

  out << "\\data\\\n";
  for (int k = 1; k <= model.order(); ++k) {
    out << "ngram " << k << '=' << model.NumNGrams(k) << '\n';
  }

  const Vocabulary &vocab = model.vocab();
  for (int k = 1; k <= model.order(); ++k) {
    out << '\n' << SectionName(k) << '\n';
    std::vector<std::pair<std::vector<std::string_view>, const NGramEntry *>> rows;
    rows.reserve(model.NumNGrams(k));
    for (const auto &[key, entry] : model.table(k)) {
      std::vector<std::string_view> words;
      for (char32_t id : key) words.push_back(vocab.Word(static_cast<WordId>(id)));
      rows.emplace_back(std::move(words), &entry);
    }
    std::sort(rows.begin(), rows.end(),
              [](const auto &a, const auto &b) { return a.first < b.first; });
    std::string line;
    for (const auto &[words, entry] : rows) {
      line = FormatLog(entry->log10_prob);
      line += '\t';
      for (std::size_t i = 0; i < words.size(); ++i) {
        if (i > 0) line += ' ';
        line += words[i];
      }
      if (entry->has_backoff && k < model.order()) {
        line += '\t';
        line += FormatLog(entry->log10_backoff);
      }
      line += '\n';
      out << line;
    }
  }
  out << "\n\\end\\\n";
}

std::string WriteArpaString(const NGramModel &model) {
  std::ostringstream out;
  WriteArpa(out, model);
  return out.str();
}

void WriteArpaFile(const std::filesystem::path &path, const NGramModel &model) {
  WriteFile(path, WriteArpaString(model));
}

NGramModel ReadArpa(std::istream &in) {
  const std::vector<std::string> lines = ReadLines(in);
  std::size_t i = 0;
  ModelMetadata meta;
  std::map<std::size_t, KnDiscount> discounts;

  // Preamble.
  for (; i < lines.size(); ++i) {
    const std::string_view line = Trim(lines[i]);
    if (line == "\\data\\") break;
    if (!lines[i].starts_with(kMetaPrefix)) continue;
    const std::string_view body = std::string_view(lines[i]).substr(kMetaPrefix.size());
    auto fields = SplitFields(body);
    if (fields.empty()) continue;
    auto value_of = [](std::string_view field, std::string_view key) {
      return field.starts_with(key) && field.size() > key.size() &&
                     field[key.size()] == '='
                 ? field.substr(key.size() + 1)
                 : std::string_view();
    };
    if (auto v = value_of(fields[0], "estimator"); !v.empty()) meta.estimator = v;
    if (auto v = value_of(fields[0], "source_digest"); !v.empty()) meta.source_digest = v;
    if (auto v = value_of(fields[0], "prep_digest"); !v.empty()) meta.prep_digest = v;
    if (fields[0] == "discount") {
      KnDiscount d;
      std::size_t order = 0;
      bool ok = true;
      for (std::size_t f = 1; f < fields.size(); ++f) {
        const auto eq = fields[f].find('=');
        if (eq == std::string_view::npos) {
          ok = false;
          break;
        }
        const auto key = fields[f].substr(0, eq);
        const auto value = fields[f].substr(eq + 1);
        int flag = 0;
        if (key == "order") ok &= ParseNumber(value, order);
        else if (key == "d1") ok &= ParseNumber(value, d.d1);
        else if (key == "d2") ok &= ParseNumber(value, d.d2);
        else if (key == "d3plus") ok &= ParseNumber(value, d.d3plus);
        else if (key == "fallback") { ok &= ParseNumber(value, flag); d.fallback = flag != 0; }
        else if (key == "n1") ok &= ParseNumber(value, d.count_of_counts[0]);
        else if (key == "n2") ok &= ParseNumber(value, d.count_of_counts[1]);
        else if (key == "n3") ok &= ParseNumber(value, d.count_of_counts[2]);
        else if (key == "n4") ok &= ParseNumber(value, d.count_of_counts[3]);
      }
      if (!ok || order == 0) throw ArpaParseError("malformed discount metadata", i + 1);
      discounts[order] = d;
    }
  }
  if (i == lines.size()) throw ArpaParseError("missing \\data\\ header", 0);
  ++i;

  // Header counts.
  std::vector<std::size_t> announced;
  for (; i < lines.size(); ++i) {
    const std::string_view line = Trim(lines[i]);
    if (line.empty()) {
      if (!announced.empty()) break;
      continue;
    }
    if (line.starts_with("\\")) break;
    if (!line.starts_with("ngram ")) {
      throw ArpaParseError("expected 'ngram <order>=<count>'", i + 1);
    }
    const auto spec = Trim(line.substr(6));
    const auto eq = spec.find('=');
    std::size_t order = 0;
    std::size_t count = 0;
    if (eq == std::string_view::npos || !ParseNumber(Trim(spec.substr(0, eq)), order) ||
        !ParseNumber(Trim(spec.substr(eq + 1)), count)) {
      throw ArpaParseError("malformed n-gram count line", i + 1);
    }
    if (order != announced.size() + 1) {
      throw ArpaParseError("n-gram counts must list orders 1, 2, ... in sequence", i + 1);
    }
    announced.push_back(count);
  }
  if (announced.empty()) throw ArpaParseError("no n-gram counts in \\data\\ header", i + 1);

  const int order = static_cast<int>(announced.size());
  NGramModel model(order, Vocabulary());
  Vocabulary &vocab = model.mutable_vocab();

  for (int k = 1; k <= order; ++k) {
    const std::string expected = SectionName(k);
    while (i < lines.size() && Trim(lines[i]).empty()) ++i;
    if (i == lines.size()) throw ArpaParseError("missing section " + expected, 0);
    const std::string_view header = Trim(lines[i]);
    if (header != expected) {
      throw ArpaParseError("expected section " + expected + " but found '" +
                               std::string(header) + "'",
                           i + 1);
    }
    const std::size_t header_line = i + 1;
    ++i;
    auto &table = model.mutable_table(k);
    table.reserve(announced[k - 1]);
    std::size_t entries = 0;
    for (; i < lines.size(); ++i) {
      const std::string_view line = Trim(lines[i]);
      if (line.empty() || line.starts_with("\\")) break;
      const auto fields = SplitFields(line);
      const auto words = static_cast<std::size_t>(k);
      if (fields.size() != words + 1 && fields.size() != words + 2) {
        throw ArpaParseError("expected " + std::to_string(words + 1) + " or " +
                                 std::to_string(words + 2) + " fields in " + expected,
                             i + 1);
      }
      NGramEntry entry;
      if (!ParseNumber(fields[0], entry.log10_prob)) {
        throw ArpaParseError("unparsable probability '" + std::string(fields[0]) + "'",
                             i + 1);
      }
      if (fields.size() == words + 2) {
        if (!ParseNumber(fields[words + 1], entry.log10_backoff)) {
          throw ArpaParseError(
              "unparsable back-off '" + std::string(fields[words + 1]) + "'", i + 1);
        }
        entry.has_backoff = k < order;
      }
      NGramKey key;
      for (std::size_t w = 1; w <= words; ++w) {
        key.push_back(static_cast<char32_t>(vocab.Add(fields[w])));
      }
      if (!table.emplace(std::move(key), entry).second) {
        throw ArpaParseError("duplicate n-gram in " + expected, i + 1);
      }
      ++entries;
    }
    if (entries != announced[k - 1]) {
      throw ArpaParseError(expected + " has " + std::to_string(entries) +
                               " entries but the header announces " +
                               std::to_string(announced[k - 1]),
                           header_line);
    }
  }

  while (i < lines.size() && Trim(lines[i]).empty()) ++i;
  if (i == lines.size()) throw ArpaParseError("missing \\end\\", 0);
  if (Trim(lines[i]) != "\\end\\") {
    throw ArpaParseError("expected \\end\\ but found '" + std::string(Trim(lines[i])) + "'",
                         i + 1);
  }

  for (const auto &[k, d] : discounts) {
    if (k > meta.discounts.size()) meta.discounts.resize(k);
    meta.discounts[k - 1] = d;
  }
  model.metadata() = std::move(meta);
  return model;
}

NGramModel ReadArpaString(const std::string &text) {
  std::istringstream in(text);
  return ReadArpa(in);
}

NGramModel ReadArpaFile(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open ARPA file", path);
  return ReadArpa(in);
}

}  // namespace htrqe
