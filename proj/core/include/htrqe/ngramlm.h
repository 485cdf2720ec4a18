// ngramlm.h
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
// Word n-gram language model with interpolated modified Kneser-Ney smoothing.
//
// Every sentence is padded with order-1 start markers and one end marker, so
// every scored token has a full-length history. The in-memory model stores
// the interpolated log10 probability of every observed n-gram together with
// the log10 back-off weight of every observed context; this is exactly the
// ARPA representation, and querying it with standard back-off reproduces the
// interpolated distribution.

#ifndef HTRQE_NGRAMLM_H_
#define HTRQE_NGRAMLM_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "htrqe/textprep.h"

namespace htrqe {

using WordId = std::uint32_t;

inline constexpr std::string_view kUnknownWord = "<unk>";
inline constexpr std::string_view kSentenceStart = "<s>";
inline constexpr std::string_view kSentenceEnd = "</s>";

// Log10 probability written for tokens that are never predicted (<s>).
inline constexpr double kNeverPredictedLog10 = -99.0;

class Vocabulary {
 public:
  static constexpr WordId kUnk = 0;
  static constexpr WordId kBos = 1;
  static constexpr WordId kEos = 2;

  Vocabulary();

  WordId Add(std::string_view word);
  std::optional<WordId> Find(std::string_view word) const;
  const std::string &Word(WordId id) const { return words_.at(id); }
  std::size_t size() const { return words_.size(); }

 private:
  std::vector<std::string> words_;
  std::unordered_map<std::string, WordId> index_;
};

// An n-gram as a string of word ids, oldest word first.
using NGramKey = std::u32string;

NGramKey MakeKey(std::span<const WordId> words);
inline WordId KeyWord(const NGramKey &key, std::size_t i) {
  return static_cast<WordId>(key[i]);
}

template <typename Value>
using NGramTable = std::unordered_map<NGramKey, Value>;

struct NGramCounts {
  int order = 0;
  Vocabulary vocab;
  // by_order[k - 1] holds raw counts of k-grams whose last word is predicted.
  std::vector<NGramTable<std::uint64_t>> by_order;
  std::size_t sentence_count = 0;

  // Raw count of a word sequence, 0 if unseen or if a word is unknown.
  std::uint64_t Count(std::span<const std::string> words) const;
  std::uint64_t Count(std::initializer_list<std::string_view> words) const;

  // Adds the counts of `other`, which must have the same order.
  void Merge(const NGramCounts &other);
};

// Throws UndefinedError if the corpus has no sentences, Error if order < 1.
NGramCounts CountNGrams(const TokenizedText &corpus, int order);

struct KnDiscount {
  double d1 = 0.0;
  double d2 = 0.0;
  double d3plus = 0.0;
  bool fallback = false;
  // Number of n-grams with (adjusted) count 1, 2, 3, 4.
  std::array<std::uint64_t, 4> count_of_counts{};

  double For(std::uint64_t count) const {
    return count == 1 ? d1 : count == 2 ? d2 : d3plus;
  }
};

struct ModelMetadata {
  std::string estimator;
  // discounts[k - 1] applies to order k.
  std::vector<KnDiscount> discounts;
  std::string source_digest;
  std::string prep_digest;
};

struct NGramEntry {
  double log10_prob = 0.0;
  double log10_backoff = 0.0;
  bool has_backoff = false;
};

class NGramModel {
 public:
  NGramModel(int order, Vocabulary vocab);

  int order() const { return order_; }
  const Vocabulary &vocab() const { return vocab_; }
  Vocabulary &mutable_vocab() { return vocab_; }
  ModelMetadata &metadata() { return metadata_; }
  const ModelMetadata &metadata() const { return metadata_; }

  // table(k) holds the k-grams, 1 <= k <= order.
  const NGramTable<NGramEntry> &table(int k) const;
  NGramTable<NGramEntry> &mutable_table(int k);
  const NGramEntry *Find(const NGramKey &key) const;
  std::size_t NumNGrams(int k) const { return table(k).size(); }

  // Standard back-off query. `context` is oldest-first; only its last
  // order-1 words are used. Throws Error if `word` has no unigram entry.
  double Log10Prob(std::span<const WordId> context, WordId word) const;

 private:
  int order_;
  Vocabulary vocab_;
  std::vector<NGramTable<NGramEntry>> tables_;
  ModelMetadata metadata_;
};

struct KnOptions {
  // Used for an order whose count-of-counts statistics give invalid or
  // non-monotone discounts.
  double fallback_discount = 0.75;
  // Spread the leftover unigram mass uniformly over the vocabulary, <unk>
  // included. When false, <unk> receives all of it.
  bool interpolate_unigrams = true;
};

// Modified Kneser-Ney discounts from count-of-counts, with the fallback rule
// applied.
KnDiscount ComputeDiscount(const std::array<std::uint64_t, 4> &count_of_counts,
                           double fallback_discount);

NGramModel EstimateKneserNey(const NGramCounts &counts,
                             const KnOptions &options = {});

NGramModel TrainKneserNey(const TokenizedText &corpus, int order,
                          const KnOptions &options = {});

enum class OovMode { kInclude, kExclude };

std::string_view OovModeName(OovMode mode);
OovMode ParseOovMode(std::string_view name);

struct PerplexityResult {
  double log2_prob_sum = 0.0;
  std::size_t token_count = 0;
  double cross_entropy = 0.0;  // bits per token
  double ppl = 0.0;
  std::size_t oov_count = 0;
};

// Scores every sentence with start/end padding and aggregates a single
// cross-entropy over all of them. Throws UndefinedError on empty text.
PerplexityResult Perplexity(const NGramModel &model, const TokenizedText &text,
                            OovMode oov_mode = OovMode::kInclude);

}  // namespace htrqe

#endif  // HTRQE_NGRAMLM_H_
