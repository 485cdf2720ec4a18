// ngramlm.cc
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

#include "htrqe/ngramlm.h"

#include <cmath>
#include <numbers>

#include "htrqe/error.h"

namespace htrqe {

Vocabulary::Vocabulary() {
  Add(kUnknownWord);
  Add(kSentenceStart);
  Add(kSentenceEnd);
}

WordId Vocabulary::Add(std::string_view word) {
  auto [it, inserted] =
      index_.try_emplace(std::string(word), static_cast<WordId>(words_.size()));
  if (inserted) words_.emplace_back(word);
  return it->second;
}

std::optional<WordId> Vocabulary::Find(std::string_view word) const {
  auto it = index_.find(std::string(word));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

NGramKey MakeKey(std::span<const WordId> words) {
  NGramKey key;
  key.reserve(words.size());
  for (WordId w : words) key.push_back(static_cast<char32_t>(w));
  return key;
}

std::uint64_t NGramCounts::Count(std::span<const std::string> words) const {
  if (words.empty() || words.size() > static_cast<std::size_t>(order)) return 0;
  NGramKey key;
  for (const auto &w : words) {
    auto id = vocab.Find(w);
    if (!id) return 0;
    key.push_back(static_cast<char32_t>(*id));
  }
  const auto &table = by_order[words.size() - 1];
  auto it = table.find(key);
  return it == table.end() ? 0 : it->second;
}

std::uint64_t NGramCounts::Count(
    std::initializer_list<std::string_view> words) const {
  std::vector<std::string> copy(words.begin(), words.end());
  return Count(copy);
}

void NGramCounts::Merge(const NGramCounts &other) {
  if (other.order != order) throw Error("cannot merge counts of different order");
  std::vector<WordId> remap(other.vocab.size());
  for (WordId id = 0; id < other.vocab.size(); ++id) {
    remap[id] = vocab.Add(other.vocab.Word(id));
  }
  for (int k = 0; k < order; ++k) {
    for (const auto &[key, count] : other.by_order[k]) {
      NGramKey mapped;
      for (char32_t c : key) mapped.push_back(static_cast<char32_t>(remap[c]));
      by_order[k][mapped] += count;
    }
  }
  sentence_count += other.sentence_count;
}

NGramCounts CountNGrams(const TokenizedText &corpus, int order) {
  if (order < 1) throw Error("n-gram order must be >= 1");
  if (corpus.sentences.empty()) {
    throw UndefinedError("cannot count n-grams of an empty corpus");
  }
  NGramCounts counts;
  counts.order = order;
  counts.by_order.resize(static_cast<std::size_t>(order));
  const auto pad = static_cast<std::size_t>(order - 1);

  NGramKey padded;
  for (std::size_t s = 0; s < corpus.sentences.size(); ++s) {
    padded.assign(pad, static_cast<char32_t>(Vocabulary::kBos));
    for (const auto &token : corpus.Sentence(s)) {
      if (token == kSentenceStart || token == kSentenceEnd || token == kUnknownWord) {
        throw Error("reserved marker '" + token + "' in training text");
      }
      padded.push_back(static_cast<char32_t>(counts.vocab.Add(token)));
    }
    padded.push_back(static_cast<char32_t>(Vocabulary::kEos));
    for (std::size_t i = pad; i < padded.size(); ++i) {
      for (std::size_t k = 1; k <= static_cast<std::size_t>(order); ++k) {
        ++counts.by_order[k - 1][padded.substr(i + 1 - k, k)];
      }
    }
    ++counts.sentence_count;
  }
  return counts;
}

NGramModel::NGramModel(int order, Vocabulary vocab)
    : order_(order), vocab_(std::move(vocab)) {
  if (order < 1) throw Error("model order must be >= 1");
  tables_.resize(static_cast<std::size_t>(order));
}

const NGramTable<NGramEntry> &NGramModel::table(int k) const {
  if (k < 1 || k > order_) throw Error("no table for order " + std::to_string(k));
  return tables_[static_cast<std::size_t>(k - 1)];
}

NGramTable<NGramEntry> &NGramModel::mutable_table(int k) {
  if (k < 1 || k > order_) throw Error("no table for order " + std::to_string(k));
  return tables_[static_cast<std::size_t>(k - 1)];
}

const NGramEntry *NGramModel::Find(const NGramKey &key) const {
  if (key.empty() || key.size() > static_cast<std::size_t>(order_)) return nullptr;
  const auto &t = tables_[key.size() - 1];
  auto it = t.find(key);
  return it == t.end() ? nullptr : &it->second;
}

double NGramModel::Log10Prob(std::span<const WordId> context, WordId word) const {
  const std::size_t max_context =
      std::min(context.size(), static_cast<std::size_t>(order_ - 1));
  const auto history = context.subspan(context.size() - max_context);

  NGramKey key = MakeKey(history);
  key.push_back(static_cast<char32_t>(word));
  double backoff = 0.0;
  // key = history + word; drop the oldest history word at each step.
  for (std::size_t start = 0; start <= max_context; ++start) {
    const NGramKey gram = key.substr(start);
    if (const NGramEntry *entry = Find(gram)) return backoff + entry->log10_prob;
    if (gram.size() > 1) {
      const NGramEntry *ctx = Find(gram.substr(0, gram.size() - 1));
      if (ctx != nullptr && ctx->has_backoff) backoff += ctx->log10_backoff;
    }
  }
  throw Error("word '" + vocab_.Word(word) + "' has no unigram entry");
}

KnDiscount ComputeDiscount(const std::array<std::uint64_t, 4> &n,
                           double fallback_discount) {
  KnDiscount d;
  d.count_of_counts = n;
  bool valid = n[0] > 0 && n[1] > 0 && n[2] > 0 && n[3] > 0;
  if (valid) {
    const double n1 = static_cast<double>(n[0]);
    const double n2 = static_cast<double>(n[1]);
    const double n3 = static_cast<double>(n[2]);
    const double n4 = static_cast<double>(n[3]);
    const double y = n1 / (n1 + 2.0 * n2);
    d.d1 = 1.0 - 2.0 * y * n2 / n1;
    d.d2 = 2.0 - 3.0 * y * n3 / n2;
    d.d3plus = 3.0 - 4.0 * y * n4 / n3;
    // Each discount must leave positive mass, and discounted counts must stay
    // strictly increasing in the raw count.
    valid = d.d1 > 0.0 && d.d1 < 1.0 && d.d2 > 0.0 && d.d2 < 2.0 &&
            d.d3plus > 0.0 && d.d3plus < 3.0 && (1.0 - d.d1) < (2.0 - d.d2) &&
            (2.0 - d.d2) < (3.0 - d.d3plus);
  }
  if (!valid) {
    d.d1 = d.d2 = d.d3plus = fallback_discount;
    d.fallback = true;
  }
  return d;
}

namespace {

struct ContextStats {
  std::uint64_t total = 0;
  std::array<std::uint64_t, 3> n{};  // continuations with count 1, 2, 3+
};

double Gamma(const ContextStats &stats, const KnDiscount &d) {
  return (d.d1 * static_cast<double>(stats.n[0]) +
          d.d2 * static_cast<double>(stats.n[1]) +
          d.d3plus * static_cast<double>(stats.n[2])) /
         static_cast<double>(stats.total);
}

}  // namespace

NGramModel EstimateKneserNey(const NGramCounts &counts, const KnOptions &options) {
  const int order = counts.order;
  if (order < 1 || counts.by_order.size() != static_cast<std::size_t>(order)) {
    throw Error("malformed count tables");
  }
  if (counts.by_order[0].empty()) throw UndefinedError("no n-grams counted");
  if (!(options.fallback_discount > 0.0 && options.fallback_discount < 1.0)) {
    throw Error("fallback discount must lie in (0, 1)");
  }

  // Highest order uses raw counts; lower orders use continuation counts, the
  // number of distinct words seen to the left.
  std::vector<NGramTable<std::uint64_t>> adjusted(static_cast<std::size_t>(order));
  adjusted[order - 1] = counts.by_order[order - 1];
  for (int k = order - 1; k >= 1; --k) {
    auto &table = adjusted[k - 1];
    for (const auto &[key, count] : counts.by_order[k]) {
      (void)count;
      ++table[key.substr(1)];
    }
  }

  NGramModel model(order, counts.vocab);
  ModelMetadata &meta = model.metadata();
  meta.estimator = options.interpolate_unigrams ? "interpolated-modified-kneser-ney"
                                                 : "interpolated-modified-kneser-ney-unk-leftover";

  for (int k = 1; k <= order; ++k) {
    const auto &table = adjusted[k - 1];
    std::array<std::uint64_t, 4> coc{};
    for (const auto &[key, c] : table) {
      if (c >= 1 && c <= 4) ++coc[c - 1];
    }
    const KnDiscount discount = ComputeDiscount(coc, options.fallback_discount);
    meta.discounts.push_back(discount);

    NGramTable<ContextStats> contexts;
    for (const auto &[key, c] : table) {
      ContextStats &stats = contexts[key.substr(0, key.size() - 1)];
      stats.total += c;
      ++stats.n[std::min<std::uint64_t>(c, 3) - 1];
    }

    auto &out = model.mutable_table(k);
    out.reserve(table.size() + 1);
    // Every predictable unigram plus <unk>.
    const double uniform = 1.0 / static_cast<double>(table.size() + 1);
    for (const auto &[key, c] : table) {
      const NGramKey context = key.substr(0, key.size() - 1);
      const ContextStats &stats = contexts.at(context);
      const double discounted =
          (static_cast<double>(c) - discount.For(c)) / static_cast<double>(stats.total);
      double prob = discounted;
      const double gamma = Gamma(stats, discount);
      if (k == 1) {
        if (options.interpolate_unigrams) prob += gamma * uniform;
      } else {
        const NGramEntry *lower = model.Find(key.substr(1));
        if (lower == nullptr) throw Error("missing lower-order n-gram");
        prob += gamma * std::pow(10.0, lower->log10_prob);
      }
      out[key].log10_prob = std::log10(prob);
    }
    if (k == 1) {
      const ContextStats &root = contexts.at(NGramKey());
      const double leftover = Gamma(root, discount);
      out[NGramKey(1, static_cast<char32_t>(Vocabulary::kUnk))].log10_prob =
          std::log10(options.interpolate_unigrams ? leftover * uniform : leftover);
    }

    // Back-off weights live on the context entries of order k - 1.
    if (k >= 2) {
      auto &lower_table = model.mutable_table(k - 1);
      for (const auto &[context, stats] : contexts) {
        auto it = lower_table.find(context);
        if (it == lower_table.end()) {
          // Start-marker contexts are never predicted themselves.
          it = lower_table.emplace(context, NGramEntry{kNeverPredictedLog10, 0.0, false})
                   .first;
        }
        it->second.log10_backoff = std::log10(Gamma(stats, discount));
        it->second.has_backoff = true;
      }
    }
  }
  // <s> always has a unigram entry, even for unigram models.
  model.mutable_table(1).try_emplace(
      NGramKey(1, static_cast<char32_t>(Vocabulary::kBos)),
      NGramEntry{kNeverPredictedLog10, 0.0, false});
  return model;
}

NGramModel TrainKneserNey(const TokenizedText &corpus, int order,
                          const KnOptions &options) {
  NGramModel model = EstimateKneserNey(CountNGrams(corpus, order), options);
  model.metadata().source_digest = corpus.Digest();
  return model;
}

std::string_view OovModeName(OovMode mode) {
  return mode == OovMode::kInclude ? "include" : "exclude";
}

OovMode ParseOovMode(std::string_view name) {
  if (name == "include") return OovMode::kInclude;
  if (name == "exclude") return OovMode::kExclude;
  throw Error("unknown OOV mode '" + std::string(name) + "'");
}

PerplexityResult Perplexity(const NGramModel &model, const TokenizedText &text,
                            OovMode oov_mode) {
  if (text.sentences.empty()) throw UndefinedError("cannot score empty text");
  const auto history_length = static_cast<std::size_t>(model.order() - 1);
  constexpr double kLog2Of10 = std::numbers::ln10 / std::numbers::ln2;

  PerplexityResult result;
  std::vector<WordId> history;
  auto push = [&history, history_length](WordId id) {
    if (history_length == 0) return;
    if (history.size() == history_length) history.erase(history.begin());
    history.push_back(id);
  };
  auto score = [&](WordId id) {
    result.log2_prob_sum += model.Log10Prob(history, id) * kLog2Of10;
    ++result.token_count;
    push(id);
  };

  for (std::size_t s = 0; s < text.sentences.size(); ++s) {
    history.assign(history_length, Vocabulary::kBos);
    for (const auto &token : text.Sentence(s)) {
      const auto id = model.vocab().Find(token);
      if (id && *id != Vocabulary::kBos && *id != Vocabulary::kUnk) {
        score(*id);
        continue;
      }
      ++result.oov_count;
      if (oov_mode == OovMode::kExclude) {
        push(Vocabulary::kUnk);
      } else {
        if (!model.Find(NGramKey(1, static_cast<char32_t>(Vocabulary::kUnk)))) {
          throw Error("model has no <unk> entry to score out-of-vocabulary '" +
                      token + "'");
        }
        score(Vocabulary::kUnk);
      }
    }
    score(Vocabulary::kEos);
  }
  if (result.token_count == 0) throw UndefinedError("no tokens were scored");
  result.cross_entropy =
      -result.log2_prob_sum / static_cast<double>(result.token_count);
  result.ppl = std::exp2(result.cross_entropy);
  return result;
}

}  // namespace htrqe
