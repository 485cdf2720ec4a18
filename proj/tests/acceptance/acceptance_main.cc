// acceptance_main.cc
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

// Acceptance checks. Prints one PASS or FAIL line per criterion and exits
// nonzero if any failed.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "htrqe/arpa.h"
#include "htrqe/cer.h"
#include "htrqe/harness.h"
#include "htrqe/ngramlm.h"
#include "htrqe/report.h"
#include "htrqe/stats.h"
#include "oracles/cer_oracle.h"
#include "study_config.h"

namespace htrqe {
namespace {

namespace fs = std::filesystem;

const fs::path kData = HTRQE_DATA_DIR;

struct Outcome {
  bool pass = true;
  std::string detail;

  void Require(bool ok, const std::string &what) {
    if (!ok) {
      pass = false;
      if (!detail.empty()) detail += "; ";
      detail += "failed: " + what;
    }
  }
  void Note(const std::string &what) {
    if (!detail.empty()) detail += "; ";
    detail += what;
  }
};

std::string Num(double v, int precision = 4) {
  std::ostringstream s;
  s.precision(precision);
  s << v;
  return s.str();
}

int failures = 0;

void Check(const std::string &name, const std::function<Outcome()> &body) {
  Outcome outcome;
  try {
    outcome = body();
  } catch (const std::exception &e) {
    outcome.pass = false;
    outcome.detail = std::string("exception: ") + e.what();
  }
  if (!outcome.pass) ++failures;
  std::printf("%s  %s  (%s)\n", outcome.pass ? "PASS" : "FAIL", name.c_str(),
              outcome.detail.c_str());
  std::fflush(stdout);
}

// The synthetic study is shared by several criteria.
struct SyntheticRun {
  RankingStudy study;
  std::size_t reference_tokens = 0;
  double seconds = 0;
};

const SyntheticRun &Synthetic() {
  static const SyntheticRun run = [] {
    SyntheticRun r;
    const auto start = std::chrono::steady_clock::now();
    cli::StudySetup setup = cli::PrepareStudy(kData / "study" / "synthetic.toml");
    r.study = RunStudy(setup.resources, setup.outputs, setup.gt, setup.options);
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const PrepConfig &prep = setup.resources.prep;
    const RawCorpus raw =
        cli::ReadCorpus(cli::ExpandInputs({kData / "shakespeare" / "reference"}));
    r.reference_tokens = Tokenize(Clean(raw, prep), prep).tokens.size();
    return r;
  }();
  return run;
}

double Rho(const RankingStudy &study, const std::string &metric) {
  const auto &a = study.analyses.at(metric);
  if (!a.correlation) throw Error("no correlation for " + metric);
  return a.correlation->rho;
}

Outcome SyntheticReplication() {
  Outcome o;
  const SyntheticRun &run = Synthetic();
  o.Require(run.reference_tokens >= 200000, "reference corpus has >= 200k tokens");
  o.Note("reference tokens " + std::to_string(run.reference_tokens));
  o.Require(run.study.model_ids.size() == 10, "10 pseudo-models");
  const std::string ng6 = NGramRatioId(6, GramExtraction::kWithinToken);
  const std::string ng7 = NGramRatioId(7, GramExtraction::kWithinToken);
  for (const std::string &m : {TokenRatioId(), ng6, ng7}) {
    const double rho = Rho(run.study, m);
    o.Require(rho >= 0.9, m + " rho >= 0.9");
    o.Note(m + " rho " + Num(rho));
  }
  const double ppl = Rho(run.study, std::string(kPplMetricId));
  o.Require(ppl >= 0.6, "ppl rho >= 0.6");
  o.Note("ppl rho " + Num(ppl));
  o.Require(run.study.provenance.at("resources").at("lm").at("order") == 3, "3-gram LM");
  o.Require(run.seconds <= 300, "runtime <= 5 min");
  o.Note("runtime " + Num(run.seconds, 3) + " s");
  return o;
}

Outcome SyntheticTopN() {
  Outcome o;
  const RankingStudy &study = Synthetic().study;
  for (const std::string &m : {TokenRatioId(), NGramRatioId(7, GramExtraction::kWithinToken)}) {
    const auto &a = study.analyses.at(m);
    o.Require(a.top_n_evaluated && a.top_n == 1, m + " Top-N hit == 1");
    o.Note(m + " top-n " + (a.top_n ? std::to_string(*a.top_n) : std::string("none")));
  }
  return o;
}

Ranking RankingOf(const std::vector<double> &values) {
  std::vector<std::pair<std::string, double>> items;
  for (std::size_t i = 0; i < values.size(); ++i) items.emplace_back("m" + std::to_string(i), values[i]);
  return Rank(items, Direction::kHigherIsBetter);
}

Outcome SpearmanOracle() {
  Outcome o;
  std::mt19937_64 rng(20240601);
  double worst = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 3 + rng() % 18;
    std::vector<double> x(n), y(n);
    std::iota(x.begin(), x.end(), 1.0);
    std::iota(y.begin(), y.end(), 1.0);
    std::shuffle(x.begin(), x.end(), rng);
    std::shuffle(y.begin(), y.end(), rng);
    const auto r = Spearman(RankingOf(x), RankingOf(y));
    // Ranks of distinct values 1..n under higher-is-better are n + 1 - v.
    std::vector<double> rx, ry;
    for (double v : x) rx.push_back(static_cast<double>(n) + 1 - v);
    for (double v : y) ry.push_back(static_cast<double>(n) + 1 - v);
    worst = std::max(worst, std::abs(r.rho - Pearson(rx, ry)));
  }
  o.Require(worst <= 1e-12, "|spearman - pearson on ranks| <= 1e-12");
  o.Note("max deviation " + Num(worst, 3));
  const auto hand = Spearman(Rank({{"a", 1}, {"b", 2}, {"c", 3}, {"d", 4}}, Direction::kLowerIsBetter),
                             Rank({{"a", 2}, {"b", 1}, {"c", 4}, {"d", 3}}, Direction::kLowerIsBetter));
  o.Require(hand.rho == 0.6, "hand example rho == 0.6");
  o.Note("hand example " + Num(hand.rho, 15));
  return o;
}

TokenizedText FirstSentences(std::size_t count) {
  const PrepConfig prep;
  const RawCorpus raw = cli::ReadCorpus(cli::ExpandInputs({kData / "shakespeare" / "reference"}));
  const TokenizedText all = Tokenize(Clean(raw, prep), prep);
  std::vector<std::vector<std::string>> sentences;
  for (std::size_t i = 0; i < count && i < all.sentences.size(); ++i) {
    const auto s = all.Sentence(i);
    sentences.emplace_back(s.begin(), s.end());
  }
  return TokenizedText::FromSentences(sentences);
}

Outcome KnNormalization() {
  Outcome o;
  const TokenizedText fixture = FirstSentences(1000);
  o.Require(fixture.sentences.size() == 1000, "fixture has 1000 sentences");
  for (int order : {2, 3, 5}) {
    const NGramModel model = TrainKneserNey(fixture, order);
    std::vector<WordId> predictable;
    for (const auto &[key, entry] : model.table(1)) {
      if (KeyWord(key, 0) != Vocabulary::kBos) predictable.push_back(KeyWord(key, 0));
    }
    std::vector<std::vector<WordId>> contexts = {{}};
    for (int k = 1; k < order; ++k) {
      for (const auto &[key, entry] : model.table(k)) {
        if (entry.has_backoff) contexts.emplace_back(key.begin(), key.end());
      }
    }
    double worst = 0;
    for (const auto &ctx : contexts) {
      double sum = 0;
      for (WordId w : predictable) sum += std::pow(10.0, model.Log10Prob(ctx, w));
      worst = std::max(worst, std::abs(sum - 1));
    }
    o.Require(worst <= 1e-6, "order " + std::to_string(order) + " sums within 1e-6");
    o.Note("order " + std::to_string(order) + ": " + std::to_string(contexts.size()) +
           " contexts, max |sum-1| " + Num(worst, 3));
  }
  return o;
}

Outcome UniformUnigram() {
  Outcome o;
  // Every word once per sentence: all |V| predictable tokens have count n,
  // so each gets probability 1/|V|.
  const std::size_t v = 50;
  std::vector<std::vector<std::string>> sentences;
  std::vector<std::string> sentence;
  for (std::size_t i = 0; i + 1 < v; ++i) sentence.push_back("w" + std::to_string(i));
  for (int s = 0; s < 20; ++s) sentences.push_back(sentence);
  const TokenizedText text = TokenizedText::FromSentences(sentences);
  NGramModel model(1, Vocabulary());
  for (const auto &w : sentence) model.mutable_vocab().Add(w);
  const double log10p = -std::log10(static_cast<double>(v));
  for (WordId id = 0; id < model.vocab().size(); ++id) {
    NGramEntry e;
    e.log10_prob = id == Vocabulary::kBos ? kNeverPredictedLog10 : id == Vocabulary::kUnk ? -99 : log10p;
    model.mutable_table(1)[MakeKey(std::vector<WordId>{id})] = e;
  }
  const PerplexityResult r = Perplexity(model, text);
  o.Require(std::abs(r.ppl - static_cast<double>(v)) <= 1e-9, "PPL == |V| within 1e-9");
  o.Note("|V| " + std::to_string(v) + ", PPL " + Num(r.ppl, 15));
  return o;
}

Outcome ArpaRoundTrip() {
  Outcome o;
  const TokenizedText train = FirstSentences(3000);
  const NGramModel model = TrainKneserNey(train, 3);
  const std::string first = WriteArpaString(model);
  const NGramModel back = ReadArpaString(first);
  const std::string second = WriteArpaString(back);
  o.Require(first == second, "second write is byte-identical");
  const TokenizedText test = Tokenize(
      cli::ReadCorpus({kData / "shakespeare" / "test" / "winters_tale.txt"}), PrepConfig());
  const double a = Perplexity(model, test).cross_entropy;
  const double b = Perplexity(back, test).cross_entropy;
  o.Require(std::abs(a - b) <= 1e-4, "cross-entropy differs <= 1e-4 bits/token");
  o.Note("in-memory " + Num(a, 10) + " bits, reloaded " + Num(b, 10) + " bits");
  return o;
}

Outcome CerOracle() {
  Outcome o;
  const auto strings = testing::AllStrings(U"abc", 6);
  std::size_t mismatches = 0;
  for (const auto &a : strings) {
    for (const auto &b : strings) {
      if (EditDistance(a, b) != testing::NaiveDistance(a, b)) ++mismatches;
    }
  }
  o.Require(mismatches == 0, "DP equals naive recursion");
  o.Note(std::to_string(strings.size() * strings.size()) + " pairs, " + std::to_string(mismatches) +
         " mismatches");
  const double k = CharErrorRate("kitten", "sitting").cer;
  o.Require(k == 0.5, "kitten/sitting CER 0.5");
  return o;
}

Outcome AdjustedR2() {
  Outcome o;
  std::vector<double> x, y;
  for (int i = 1; i <= 10; ++i) {
    x.push_back(i * 0.1);
    y.push_back(2 * i * 0.1);
  }
  const RegressionFit line = FitPolynomial(x, y, 1);
  o.Require(std::abs(line.r2 - 1) <= 1e-12 && std::abs(line.adjusted_r2 - 1) <= 1e-12,
            "y = 2x gives r2 = adjusted = 1");
  std::mt19937_64 rng(99);
  std::normal_distribution<double> noise(0, 1);
  std::size_t fits = 0;
  bool above = false;
  double most_negative = 0;
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> nx, ny;
    for (int i = 0; i < 10; ++i) {
      nx.push_back(i);
      ny.push_back(noise(rng));
    }
    for (const auto &fit : PolyfitAdjusted(nx, ny).fits) {
      ++fits;
      above = above || fit.adjusted_r2 > fit.r2;
      most_negative = std::min(most_negative, fit.adjusted_r2);
    }
  }
  o.Require(!above, "adjusted_r2 <= r2 on every noise fit");
  o.Require(most_negative < 0, "negative adjusted R2 occurs and is kept");
  o.Note(std::to_string(fits) + " noise fits, most negative " + Num(most_negative));
  return o;
}

Outcome StubScorerStudy() {
  Outcome o;
  const RankingStudy &study = Synthetic().study;
  const std::string id(kPpplMetricId);
  o.Require(study.cells.contains(id), "pppl metric present");
  std::size_t ok = 0;
  for (const auto &[model, cell] : study.cells.at(id)) ok += cell.ok() ? 1 : 0;
  o.Require(ok == study.model_ids.size(), "every pppl cell scored");
  const auto &endpoint = study.provenance.at("resources").at("pppl").at(0).at("endpoint");
  o.Require(endpoint.get<std::string>().starts_with("stub:"), "scored by the stub");
  o.Note("endpoint " + endpoint.get<std::string>() + ", pppl rho " + Num(Rho(study, id)));
  const auto report = StudyToJson(study);
  o.Require(RenderTables({report}).find("PPPL") != std::string::npos, "PPPL column rendered");
  return o;
}

}  // namespace
}  // namespace htrqe

int main() {
  using namespace htrqe;
  Check("synthetic ranking study: rho(token, 6-gram, 7-gram) >= 0.9, rho(ppl) >= 0.6, <= 5 min",
        SyntheticReplication);
  Check("synthetic Top-N: token ratio and 7-gram ratio hit 1", SyntheticTopN);
  Check("spearman equals pearson on ranks; hand example 0.6", SpearmanOracle);
  Check("kneser-ney normalization, orders 2, 3, 5, 1k sentences, 1e-6", KnNormalization);
  Check("uniform unigram PPL equals |V| within 1e-9", UniformUnigram);
  Check("ARPA round trip within 1e-4 bits/token, byte-identical rewrite", ArpaRoundTrip);
  Check("CER exhaustive oracle over {a,b,c}^<=6; kitten/sitting 0.5", CerOracle);
  Check("adjusted R2: exact line, bounded by r2, negative representable", AdjustedR2);
  Check("stub-scorer study with PPPL", StubScorerStudy);
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
