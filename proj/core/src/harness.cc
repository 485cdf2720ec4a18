// harness.cc
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

#include "htrqe/harness.h"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <functional>
#include <set>
#include <thread>

#include "htrqe/error.h"

namespace htrqe {
namespace {

struct MetricTask {
  MetricInfo info;
  std::function<MetricCell(const ModelOutput &)> score;
};

MetricCell RatioCell(const RatioScore &score) {
  MetricCell cell;
  cell.value = score.value;
  cell.detail = {{"hits", score.hits}, {"total", score.total}};
  return cell;
}

std::vector<MetricTask> BuildTasks(const StudyResources &resources) {
  std::vector<MetricTask> tasks;
  if (resources.lexicon) {
    const Lexicon *lex = &*resources.lexicon;
    tasks.push_back({{TokenRatioId(), Direction::kHigherIsBetter, "token", "Token ratio"},
                     [lex](const ModelOutput &out) { return RatioCell(TokenRatio(out.text, *lex)); }});
  }
  for (const auto &gs : resources.ngram_sets) {
    const NGramSet *set = &gs;
    std::string label = std::to_string(gs.order) + "-gram";
    if (gs.extraction == GramExtraction::kCrossToken) label += " (cross)";
    tasks.push_back({{NGramRatioId(gs.order, gs.extraction), Direction::kHigherIsBetter, "ngram",
                      label},
                     [set](const ModelOutput &out) { return RatioCell(NGramRatio(out.text, *set)); }});
  }
  if (resources.lm) {
    const NGramModel *lm = &*resources.lm;
    const OovMode mode = resources.oov_mode;
    tasks.push_back({{std::string(kPplMetricId), Direction::kLowerIsBetter, "ppl", "Statistical LM"},
                     [lm, mode](const ModelOutput &out) {
                       const auto r = Perplexity(*lm, out.text, mode);
                       MetricCell cell;
                       cell.value = r.ppl;
                       cell.detail = {{"cross_entropy", r.cross_entropy},
                                      {"token_count", r.token_count},
                                      {"oov_count", r.oov_count}};
                       return cell;
                     }});
  }
  for (const auto &res : resources.pppl) {
    const PpplResource *pr = &res;
    tasks.push_back({{res.MetricId(), Direction::kLowerIsBetter, "pppl",
                      res.model_hint ? *res.model_hint : "PPPL"},
                     [pr](const ModelOutput &out) {
                       if (!pr->scorer) throw TransportError(pr->error);
                       const auto doc =
                           ScoreDocument(*pr->scorer, out.text, out.model_id, pr->model_hint);
                       MetricCell cell;
                       cell.value = doc.pppl;
                       cell.detail = {{"token_count", doc.token_count},
                                      {"log_prob_sum", doc.log_prob_sum},
                                      {"sentences", doc.items}};
                       return cell;
                     }});
  }
  std::sort(tasks.begin(), tasks.end(), [](const auto &a, const auto &b) {
    return a.info.metric_id < b.info.metric_id;
  });
  for (std::size_t i = 1; i < tasks.size(); ++i) {
    if (tasks[i].info.metric_id == tasks[i - 1].info.metric_id) {
      throw Error("metric '" + tasks[i].info.metric_id + "' is configured twice");
    }
  }
  return tasks;
}

template <typename Fn>
void ParallelFor(std::size_t count, std::size_t jobs, Fn fn) {
  if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
  jobs = std::min(jobs, count);
  if (jobs <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> workers;
  workers.reserve(jobs);
  for (std::size_t w = 0; w < jobs; ++w) {
    workers.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) fn(i);
    });
  }
  for (auto &worker : workers) worker.join();
}

nlohmann::json Provenance(const StudyResources &resources, const std::optional<GroundTruth> &gt,
                          const StudyOptions &options) {
  nlohmann::json p;
  p["prep"] = resources.prep.ToJson();
  p["prep_digest"] = resources.prep.Digest();
  nlohmann::json res = nlohmann::json::object();
  if (resources.lexicon) {
    res["lexicon"] = {{"types", resources.lexicon->types.size()},
                      {"source_digest", resources.lexicon->built_from}};
  }
  for (const auto &gs : resources.ngram_sets) {
    res["ngrams"].push_back({{"order", gs.order},
                             {"extraction", GramExtractionName(gs.extraction)},
                             {"grams", gs.grams.size()},
                             {"source_digest", gs.built_from}});
  }
  if (resources.lm) {
    const auto &meta = resources.lm->metadata();
    nlohmann::json lm = {{"order", resources.lm->order()},
                         {"estimator", meta.estimator},
                         {"source_digest", meta.source_digest},
                         {"oov_mode", OovModeName(resources.oov_mode)}};
    for (std::size_t k = 0; k < meta.discounts.size(); ++k) {
      lm["discount_fallback"].push_back(meta.discounts[k].fallback);
    }
    res["lm"] = lm;
  }
  for (const auto &pr : resources.pppl) {
    nlohmann::json entry = {{"metric_id", pr.MetricId()},
                            {"endpoint", pr.endpoint},
                            {"granularity", "preprocessed sentence"},
                            {"log_base", "e"}};
    entry["model_hint"] = pr.model_hint ? nlohmann::json(*pr.model_hint) : nlohmann::json();
    if (pr.scorer) entry["models"] = pr.scorer->handshake().models;
    res["pppl"].push_back(entry);
  }
  p["resources"] = res;
  if (gt) p["cer"] = gt->cer_options.ToJson();
  p["analysis"] = {{"degrees", options.degrees},
                   {"alternative", AlternativeName(options.alternative)},
                   {"top_n", options.top_n},
                   {"anova_top", options.anova_top}};
  return p;
}

void Analyze(const MetricInfo &info, const std::map<std::string, MetricCell> &cells,
             const std::map<std::string, CerResult> *cers, const StudyOptions &options,
             MetricAnalysis &analysis) {
  std::vector<std::pair<std::string, double>> scores;
  for (const auto &[model, cell] : cells) {
    if (cell.ok() && (cers == nullptr || cers->contains(model))) {
      scores.emplace_back(model, *cell.value);
    }
  }
  analysis.valid_cells = scores.size();
  if (scores.empty()) {
    analysis.skipped["ranking"] = "no valid cells";
  } else {
    analysis.ranking = Rank(scores, info.direction);
  }
  if (cers == nullptr) return;
  if (scores.size() < 3) {
    const std::string why = "fewer than 3 valid cells";
    analysis.skipped["correlation"] = why;
    analysis.skipped["fit"] = why;
    analysis.skipped["top_n"] = why;
    return;
  }
  std::vector<std::pair<std::string, double>> reference;
  std::vector<double> xs;
  std::vector<double> ys;
  for (const auto &[model, value] : scores) {
    reference.emplace_back(model, cers->at(model).cer);
    xs.push_back(value);
    ys.push_back(cers->at(model).cer);
  }
  const Ranking ref_rank = Rank(reference, Direction::kLowerIsBetter);
  try {
    analysis.correlation = Spearman(*analysis.ranking, ref_rank, options.alternative);
  } catch (const Error &e) {
    analysis.skipped["correlation"] = e.what();
  }
  std::vector<int> degrees;
  for (int d : options.degrees) {
    if (d >= 1 && scores.size() > static_cast<std::size_t>(d) + 1) degrees.push_back(d);
  }
  if (degrees.empty()) {
    analysis.skipped["fit"] = "too few samples for any configured degree";
  } else {
    try {
      analysis.fit = PolyfitAdjusted(xs, ys, degrees);
    } catch (const Error &e) {
      analysis.skipped["fit"] = e.what();
    }
  }
  try {
    analysis.top_n = TopNHit(*analysis.ranking, ref_rank, options.top_n);
    analysis.top_n_evaluated = true;
  } catch (const Error &e) {
    analysis.skipped["top_n"] = e.what();
  }
}

void RunAnova(const std::optional<GroundTruth> &gt, const std::vector<ModelOutput> &outputs,
              RankingStudy &study, const StudyOptions &options) {
  if (!study.reference_ranking) return;
  const auto ordered = study.reference_ranking->Ordered();
  const std::size_t top = std::min(options.anova_top, ordered.size());
  std::vector<std::vector<double>> groups;
  for (std::size_t i = 0; i < top; ++i) {
    const auto it = std::find_if(outputs.begin(), outputs.end(),
                                 [&](const auto &o) { return o.model_id == ordered[i]; });
    if (it->raw_lines.size() != gt->reference_lines.size()) {
      study.anova_error = "model '" + it->model_id + "' is not line-aligned with the reference";
      return;
    }
    std::vector<double> per_line;
    for (std::size_t l = 0; l < it->raw_lines.size(); ++l) {
      const auto r = NormalizeForCer(gt->reference_lines[l], gt->cer_options);
      if (r.empty()) continue;
      const auto h = NormalizeForCer(it->raw_lines[l], gt->cer_options);
      per_line.push_back(static_cast<double>(EditDistance(r, h)) /
                         static_cast<double>(r.size()));
    }
    groups.push_back(std::move(per_line));
    study.anova_models.push_back(ordered[i]);
  }
  try {
    study.anova = AnovaSingleFactor(groups);
  } catch (const Error &e) {
    study.anova_error = e.what();
  }
}

}  // namespace

std::string PpplResource::MetricId() const {
  std::string id(kPpplMetricId);
  if (model_hint) id += "_" + *model_hint;
  return id;
}

ModelOutput MakeModelOutput(std::string model_id, std::string test_set_id,
                            std::vector<std::string> lines, const PrepConfig &prep) {
  ModelOutput out;
  out.model_id = std::move(model_id);
  out.test_set_id = std::move(test_set_id);
  out.text = Tokenize(RawCorpus{lines, out.model_id}, prep);
  out.raw_lines = std::move(lines);
  out.prep_digest = prep.Digest();
  return out;
}

std::size_t RankingStudy::FailedCells() const {
  std::size_t failed = 0;
  for (const auto &[metric, by_model] : cells) {
    for (const auto &[model, cell] : by_model) {
      if (!cell.ok()) ++failed;
    }
  }
  return failed;
}

std::vector<std::string> RankingStudy::MetricsFailedEverywhere() const {
  std::vector<std::string> ids;
  for (const auto &[metric, by_model] : cells) {
    if (!by_model.empty() &&
        std::none_of(by_model.begin(), by_model.end(),
                     [](const auto &kv) { return kv.second.ok(); })) {
      ids.push_back(metric);
    }
  }
  return ids;
}

std::vector<MetricInfo> EnabledMetrics(const StudyResources &resources) {
  std::vector<MetricInfo> infos;
  for (auto &task : BuildTasks(resources)) infos.push_back(std::move(task.info));
  return infos;
}

RankingStudy RunStudy(const StudyResources &resources, const std::vector<ModelOutput> &outputs,
                      const std::optional<GroundTruth> &gt, const StudyOptions &options) {
  if (outputs.empty()) throw Error("a study needs at least one model output");
  const std::string prep_digest = resources.prep.Digest();
  std::set<std::string> ids;
  for (const auto &out : outputs) {
    if (!ids.insert(out.model_id).second) {
      throw Error("model id '" + out.model_id + "' occurs more than once");
    }
    if (out.test_set_id != outputs.front().test_set_id) {
      throw Error("outputs belong to different test sets: '" + out.test_set_id + "' and '" +
                  outputs.front().test_set_id + "'");
    }
    if (out.prep_digest != prep_digest) {
      throw Error("output '" + out.model_id +
                  "' was preprocessed with a different configuration than the resources");
    }
  }
  const auto tasks = BuildTasks(resources);

  RankingStudy study;
  study.test_set_id = outputs.front().test_set_id;
  study.model_ids.assign(ids.begin(), ids.end());
  for (const auto &task : tasks) study.metrics.push_back(task.info);
  study.provenance = Provenance(resources, gt, options);

  // Cells are written into preallocated slots so that worker order cannot
  // affect the result.
  std::vector<MetricCell> grid(tasks.size() * outputs.size());
  ParallelFor(grid.size(), options.jobs, [&](std::size_t i) {
    const auto &task = tasks[i / outputs.size()];
    const auto &out = outputs[i % outputs.size()];
    try {
      grid[i] = task.score(out);
    } catch (const std::exception &e) {
      grid[i] = MetricCell();
      grid[i].error = e.what();
    }
  });
  for (std::size_t t = 0; t < tasks.size(); ++t) {
    auto &by_model = study.cells[tasks[t].info.metric_id];
    for (std::size_t o = 0; o < outputs.size(); ++o) {
      by_model[outputs[o].model_id] = std::move(grid[t * outputs.size() + o]);
    }
  }

  if (gt) {
    std::vector<std::optional<CerResult>> cers(outputs.size());
    std::vector<std::string> errors(outputs.size());
    ParallelFor(outputs.size(), options.jobs, [&](std::size_t i) {
      try {
        cers[i] = AlignedCer(gt->reference_lines, outputs[i].raw_lines, gt->cer_options);
      } catch (const std::exception &e) {
        errors[i] = e.what();
      }
    });
    study.reference_cers.emplace();
    std::vector<std::pair<std::string, double>> reference;
    for (std::size_t i = 0; i < outputs.size(); ++i) {
      if (cers[i]) {
        (*study.reference_cers)[outputs[i].model_id] = *cers[i];
        reference.emplace_back(outputs[i].model_id, cers[i]->cer);
      } else {
        study.reference_errors[outputs[i].model_id] = errors[i];
      }
    }
    if (!reference.empty()) study.reference_ranking = Rank(reference, Direction::kLowerIsBetter);
  }

  const std::map<std::string, CerResult> *cers =
      study.reference_cers ? &*study.reference_cers : nullptr;
  for (const auto &info : study.metrics) {
    Analyze(info, study.cells.at(info.metric_id), cers, options,
            study.analyses[info.metric_id]);
  }
  if (gt) RunAnova(gt, outputs, study, options);
  return study;
}

std::string SyntheticModelId(double level) {
  char buffer[32];
  auto [end, ec] =
      std::to_chars(buffer, buffer + sizeof buffer, level, std::chars_format::fixed, 3);
  if (ec != std::errc()) throw Error("cannot format corruption level");
  return "cer_" + std::string(buffer, end);
}

std::vector<SyntheticModel> CorruptSeries(const std::vector<std::string> &lines,
                                          const std::vector<double> &levels, std::uint64_t seed,
                                          const PrepConfig &prep, const std::string &test_set_id,
                                          CorruptionSpec base) {
  if (levels.empty()) throw Error("corruption series needs at least one level");
  std::set<double> seen;
  std::set<std::string> names;
  for (double level : levels) {
    if (!(level >= 0.0 && level < 1.0)) throw Error("corruption levels must lie in [0, 1)");
    if (!seen.insert(level).second || !names.insert(SyntheticModelId(level)).second) {
      throw Error("duplicate corruption level " + SyntheticModelId(level).substr(4));
    }
  }
  std::vector<SyntheticModel> models;
  models.reserve(levels.size());
  for (std::size_t i = 0; i < levels.size(); ++i) {
    CorruptionSpec spec = base;
    spec.target_cer = levels[i];
    spec.seed = DeriveSeed(seed, i);
    SyntheticModel model;
    model.target_cer = levels[i];
    model.corruption = Corrupt(lines, spec);
    model.output =
        MakeModelOutput(SyntheticModelId(levels[i]), test_set_id, model.corruption.lines, prep);
    models.push_back(std::move(model));
  }
  return models;
}

}  // namespace htrqe
