// htrqe_benchmark.cc
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

#include <random>
#include <string>
#include <vector>

#include <benchmark/benchmark.h>

#include "htrqe/cer.h"
#include "htrqe/corrupt.h"
#include "htrqe/ngramlm.h"
#include "htrqe/textprep.h"

namespace htrqe {
namespace {

std::vector<std::string> SyntheticLines(std::size_t count, std::uint64_t seed) {
  static const std::vector<std::string> kWords = {
      "the", "king", "shall", "not", "speak", "of", "this", "my", "lord", "good",
      "and", "what", "is", "a", "man", "sir", "come", "here", "now", "well"};
  std::mt19937_64 rng(seed);
  std::vector<std::string> lines;
  lines.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    std::string line;
    const std::size_t words = 4 + rng() % 8;
    for (std::size_t w = 0; w < words; ++w) {
      if (w > 0) line += ' ';
      line += kWords[rng() % kWords.size()];
    }
    line += '.';
    lines.push_back(std::move(line));
  }
  return lines;
}

void BM_EditDistance(benchmark::State &state) {
  const auto lines = SyntheticLines(static_cast<std::size_t>(state.range(0)), 1);
  std::string ref;
  for (const auto &line : lines) ref += line + " ";
  CorruptionSpec spec;
  spec.target_cer = 0.1;
  spec.seed = 2;
  const auto hyp = Corrupt({ref}, spec).lines.front();
  const auto r = NormalizeForCer(ref, {});
  const auto h = NormalizeForCer(hyp, {});
  for (auto _ : state) benchmark::DoNotOptimize(EditDistance(r, h));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(r.size()));
}
BENCHMARK(BM_EditDistance)->Arg(10)->Arg(100)->Arg(1000);

void BM_Tokenize(benchmark::State &state) {
  const RawCorpus corpus{SyntheticLines(static_cast<std::size_t>(state.range(0)), 3), "bench"};
  const PrepConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(Tokenize(corpus, cfg));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Tokenize)->Arg(1000)->Arg(10000);

void BM_TrainKneserNey(benchmark::State &state) {
  const RawCorpus corpus{SyntheticLines(20000, 4), "bench"};
  const TokenizedText text = Tokenize(corpus, PrepConfig());
  const int order = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(TrainKneserNey(text, order));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(text.tokens.size()));
}
BENCHMARK(BM_TrainKneserNey)->Arg(3)->Arg(5)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace htrqe

BENCHMARK_MAIN();
