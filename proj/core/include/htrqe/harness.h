// harness.h
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
// Ranking studies: score every model output with every enabled metric, rank
// the models per metric and, when a reference transcription is available,
// compare each metric ranking with the CER ranking.

#ifndef HTRQE_HARNESS_H_
#define HTRQE_HARNESS_H_

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "htrqe/cer.h"
#include "htrqe/corrupt.h"
#include "htrqe/lexmetrics.h"
#include "htrqe/ngramlm.h"
#include "htrqe/pppl.h"
#include "htrqe/stats.h"
#include "htrqe/textprep.h"

namespace htrqe {

inline constexpr std::string_view kPplMetricId = "ppl";
inline constexpr std::string_view kPpplMetricId = "pppl";

struct PpplResource {
  std::string endpoint;
  std::optional<std::string> model_hint;
  // Null when the scorer could not be created; cells then fail with `error`.
  std::shared_ptr<PpplScorer> scorer;
  std::string error;

  std::string MetricId() const;
};

struct StudyResources {
  PrepConfig prep;
  std::optional<Lexicon> lexicon;
  std::vector<NGramSet> ngram_sets;
  std::optional<NGramModel> lm;
  OovMode oov_mode = OovMode::kInclude;
  std::vector<PpplResource> pppl;
};

struct ModelOutput {
  std::string model_id;
  std::string test_set_id;
  std::vector<std::string> raw_lines;
  TokenizedText text;
  std::string prep_digest;
};

// Tokenizes `lines` with `prep`. Hypotheses are not line-filtered: dropping
// lines would hide recognition errors from the metrics.
ModelOutput MakeModelOutput(std::string model_id, std::string test_set_id,
                            std::vector<std::string> lines, const PrepConfig &prep);

struct GroundTruth {
  std::vector<std::string> reference_lines;
  CerOptions cer_options;
};

struct StudyOptions {
  std::size_t jobs = 0;  // 0 = hardware concurrency
  std::vector<int> degrees = {1, 2, 3, 4};
  Alternative alternative = Alternative::kTwoSided;
  std::vector<int> top_n = {1, 3, 5};
  // Models entering the ANOVA on per-line CERs.
  std::size_t anova_top = 5;
};

struct MetricInfo {
  std::string metric_id;
  Direction direction = Direction::kHigherIsBetter;
  std::string family;  // "pppl", "ppl", "token", "ngram"
  std::string label;
};

struct MetricCell {
  std::optional<double> value;
  std::string error;
  nlohmann::json detail;

  bool ok() const { return value.has_value(); }
};

struct MetricAnalysis {
  std::size_t valid_cells = 0;
  std::optional<Ranking> ranking;
  std::optional<RankCorrelation> correlation;
  std::optional<PolyfitResult> fit;
  std::optional<int> top_n;
  bool top_n_evaluated = false;
  // Why a part of the analysis is missing, keyed by "ranking",
  // "correlation", "fit", "top_n".
  std::map<std::string, std::string> skipped;
};

struct RankingStudy {
  std::string test_set_id;
  std::vector<std::string> model_ids;  // sorted
  std::vector<MetricInfo> metrics;     // sorted by metric_id
  // cells[metric_id][model_id]
  std::map<std::string, std::map<std::string, MetricCell>> cells;
  std::optional<std::map<std::string, CerResult>> reference_cers;
  std::map<std::string, std::string> reference_errors;
  std::optional<Ranking> reference_ranking;
  std::map<std::string, MetricAnalysis> analyses;
  std::optional<AnovaResult> anova;
  std::vector<std::string> anova_models;
  std::string anova_error;
  nlohmann::json provenance;

  std::size_t FailedCells() const;
  // Metric ids whose cells all failed.
  std::vector<std::string> MetricsFailedEverywhere() const;
};

// The metrics enabled by `resources`, sorted by id.
std::vector<MetricInfo> EnabledMetrics(const StudyResources &resources);

// Throws Error when a model id repeats, test sets differ or an output was
// preprocessed with a different configuration than the resources.
RankingStudy RunStudy(const StudyResources &resources,
                      const std::vector<ModelOutput> &outputs,
                      const std::optional<GroundTruth> &gt,
                      const StudyOptions &options = {});

struct SyntheticModel {
  ModelOutput output;
  double target_cer = 0.0;
  CorruptionResult corruption;
};

// Model id for a corruption level, e.g. "cer_0.050"; lexicographic order of
// ids follows level order.
std::string SyntheticModelId(double level);

// One pseudo-model per level, each corrupted with DeriveSeed(seed, index).
// Throws Error on duplicate levels or a level outside [0, 1).
std::vector<SyntheticModel> CorruptSeries(const std::vector<std::string> &lines,
                                          const std::vector<double> &levels,
                                          std::uint64_t seed, const PrepConfig &prep,
                                          const std::string &test_set_id = "synthetic",
                                          CorruptionSpec base = {});

}  // namespace htrqe

#endif  // HTRQE_HARNESS_H_
