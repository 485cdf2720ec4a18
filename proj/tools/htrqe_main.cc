// htrqe_main.cc
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
// htrqe: quality estimation for text recognition output.
//
// Exit status: 0 success, 1 usage error, 2 data error, 3 when some metric
// could not be computed for some output.

#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "htrqe/arpa.h"
#include "htrqe/cer.h"
#include "htrqe/corrupt.h"
#include "htrqe/error.h"
#include "htrqe/harness.h"
#include "htrqe/io.h"
#include "htrqe/lexmetrics.h"
#include "htrqe/ngramlm.h"
#include "htrqe/pppl.h"
#include "htrqe/report.h"
#include "htrqe/textprep.h"
#include "htrqe/unicode.h"
#include "study_config.h"

namespace htrqe::cli {
namespace {

namespace fs = std::filesystem;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitPartial = 3;

struct PrepFlags {
  std::string config_path;
  std::string charset = "latin";
  bool lowercase = true;
  std::string dedup = "line";
  std::vector<std::string> boilerplate;

  PrepConfig Build() const {
    if (!config_path.empty()) {
      auto j = nlohmann::json::parse(ReadFile(config_path), nullptr, false);
      if (j.is_discarded()) throw IoError("invalid JSON", config_path);
      // Accept a prep manifest as well as a bare config.
      if (j.contains("config")) j = j.at("config");
      return PrepConfig::FromJson(j);
    }
    PrepConfig cfg = PrepConfig::WithCharset(charset);
    cfg.lowercase = lowercase;
    if (dedup == "line") {
      cfg.dedup_scope = DedupScope::kLine;
    } else if (dedup == "document") {
      cfg.dedup_scope = DedupScope::kDocument;
    } else {
      throw Error("unknown dedup scope '" + dedup + "'");
    }
    cfg.boilerplate_patterns = boilerplate;
    return cfg;
  }
};

void AddPrepFlags(CLI::App *app, PrepFlags &flags) {
  app->add_option("--prep-config", flags.config_path,
                  "JSON preprocessing config or prep manifest; overrides the flags below")
      ;
  app->add_option("--charset", flags.charset, "Allowed alphabet: latin or latin-ext")
      ->capture_default_str();
  app->add_flag("--lowercase,!--no-lowercase", flags.lowercase, "Case-fold tokens")
      ->capture_default_str();
  app->add_option("--dedup", flags.dedup, "Deduplication unit: line or document")
      ->capture_default_str();
  app->add_option("--boilerplate", flags.boilerplate,
                  "Drop lines containing this literal text (repeatable)");
}

void WriteJson(const nlohmann::json &j, const std::string &path) {
  const std::string text = j.dump(2) + "\n";
  if (path.empty() || path == "-") {
    std::cout << text;
  } else {
    WriteFile(path, text);
  }
}

TokenizedText ReadTokenized(const fs::path &path) {
  std::vector<std::vector<std::string>> sentences;
  for (const auto &line : ReadLinesFromFile(path)) {
    std::vector<std::string> tokens;
    std::size_t i = 0;
    while (i < line.size()) {
      while (i < line.size() && line[i] == kTokenSeparator) ++i;
      std::size_t j = i;
      while (j < line.size() && line[j] != kTokenSeparator) ++j;
      if (j > i) tokens.push_back(line.substr(i, j - i));
      i = j;
    }
    if (!tokens.empty()) sentences.push_back(std::move(tokens));
  }
  return TokenizedText::FromSentences(sentences);
}

// Reference text for resource building: raw files are cleaned and
// tokenized; pretokenized files hold one sentence per line.
TokenizedText LoadReference(const std::vector<std::string> &inputs, bool pretokenized,
                            const PrepConfig &cfg) {
  std::vector<fs::path> paths(inputs.begin(), inputs.end());
  if (pretokenized) {
    TokenizedText all;
    for (const auto &path : ExpandInputs(paths)) Append(all, ReadTokenized(path));
    return all;
  }
  return Tokenize(Clean(ReadCorpus(paths), cfg), cfg);
}

// Hypotheses are tokenized but not line-filtered.
TokenizedText LoadHypothesis(const std::string &path, bool pretokenized, const PrepConfig &cfg) {
  if (pretokenized) return ReadTokenized(path);
  return Tokenize(RawCorpus{ReadLinesFromFile(path), path}, cfg);
}

std::string OrderPath(const std::string &pattern, int n, bool several) {
  const auto at = pattern.find("{n}");
  if (at == std::string::npos) {
    if (several) throw Error("output path must contain {n} when several orders are built");
    return pattern;
  }
  std::string path = pattern;
  path.replace(at, 3, std::to_string(n));
  return path;
}

int RunPrep(const std::string &in, const std::string &out, bool tokenize, const PrepFlags &flags) {
  const PrepConfig cfg = flags.Build();
  const RawCorpus input{ReadLinesFromFile(in), fs::path(in).filename().string()};
  const CleanResult result = CleanWithCounts(input, cfg);
  if (tokenize) {
    const TokenizedText text = Tokenize(result.corpus, cfg);
    std::vector<std::string> lines;
    lines.reserve(text.sentences.size());
    for (std::size_t i = 0; i < text.sentences.size(); ++i) lines.push_back(text.SentenceText(i));
    WriteLinesToFile(out, lines);
  } else {
    WriteLinesToFile(out, result.corpus.lines);
  }
  WriteJson(PrepManifest(input, result, cfg, tokenize), out + ".manifest.json");
  return kExitOk;
}

}  // namespace

int Main(int argc, char **argv) {
  CLI::App app{"Ground-truth-free quality estimation for text recognition output", "htrqe"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "htrqe 0.1.0");

  // prep
  auto *prep = app.add_subcommand("prep", "Filter, deduplicate and optionally tokenize a corpus");
  PrepFlags prep_flags;
  std::string prep_in;
  std::string prep_out;
  bool prep_tokenize = false;
  prep->add_option("IN", prep_in, "Input text file")->required();
  prep->add_option("OUT", prep_out, "Output text file; OUT.manifest.json is written beside it")
      ->required();
  prep->add_flag("--tokenize", prep_tokenize, "Write one tokenized sentence per line");
  AddPrepFlags(prep, prep_flags);

  // lexicon build
  auto *lexicon = app.add_subcommand("lexicon", "Reference lexicons")->require_subcommand(1);
  auto *lexicon_build = lexicon->add_subcommand("build", "Build a lexicon from reference text");
  PrepFlags lex_flags;
  std::vector<std::string> lex_in;
  std::string lex_out;
  bool lex_pretokenized = false;
  lexicon_build->add_option("REF", lex_in, "Reference files or directories")->required();
  lexicon_build->add_option("-o,--out", lex_out, "Output lexicon file")->required();
  lexicon_build->add_flag("--pretokenized", lex_pretokenized,
                          "Input holds one tokenized sentence per line");
  AddPrepFlags(lexicon_build, lex_flags);

  // ngrams build
  auto *ngrams = app.add_subcommand("ngrams", "Reference character n-gram sets")->require_subcommand(1);
  auto *ngrams_build = ngrams->add_subcommand("build", "Build character n-gram sets");
  PrepFlags ng_flags;
  std::vector<std::string> ng_in;
  std::string ng_out;
  std::vector<int> ng_orders;
  std::string ng_extraction = "within-token";
  int ng_max_order = kDefaultMaxGramOrder;
  bool ng_pretokenized = false;
  ngrams_build->add_option("REF", ng_in, "Reference files or directories")->required();
  ngrams_build->add_option("-o,--out", ng_out, "Output file; {n} is replaced by the order")
      ->required();
  ngrams_build->add_option("-n,--order", ng_orders, "Order (repeatable)")->required();
  ngrams_build->add_option("--extraction", ng_extraction, "within-token or cross-token")
      ->capture_default_str();
  ngrams_build->add_option("--max-order", ng_max_order, "Largest accepted order")
      ->capture_default_str();
  ngrams_build->add_flag("--pretokenized", ng_pretokenized,
                         "Input holds one tokenized sentence per line");
  AddPrepFlags(ngrams_build, ng_flags);

  // lm train | ppl
  auto *lm = app.add_subcommand("lm", "Kneser-Ney word n-gram language models")->require_subcommand(1);
  auto *lm_train = lm->add_subcommand("train", "Train a model and write it as ARPA");
  PrepFlags lm_flags;
  std::vector<std::string> lm_in;
  std::string lm_out;
  int lm_order = 3;
  double lm_fallback = 0.75;
  bool lm_pretokenized = false;
  lm_train->add_option("REF", lm_in, "Reference files or directories")->required();
  lm_train->add_option("-o,--out", lm_out, "Output ARPA file")->required();
  lm_train->add_option("-n,--order", lm_order, "Model order")->capture_default_str();
  lm_train->add_option("--fallback-discount", lm_fallback,
                       "Discount used where count statistics give invalid values")
      ->capture_default_str();
  bool lm_interpolate = true;
  lm_train->add_flag("--interpolate-unigrams,!--no-interpolate-unigrams", lm_interpolate,
                     "Spread leftover unigram mass over the vocabulary instead of giving it to <unk>")
      ->capture_default_str();
  lm_train->add_flag("--pretokenized", lm_pretokenized,
                     "Input holds one tokenized sentence per line");
  AddPrepFlags(lm_train, lm_flags);

  auto *lm_ppl = lm->add_subcommand("ppl", "Perplexity of a text under an ARPA model");
  PrepFlags ppl_flags;
  std::string ppl_model;
  std::string ppl_text;
  std::string ppl_oov = "include";
  bool ppl_pretokenized = false;
  lm_ppl->add_option("MODEL", ppl_model, "ARPA file")->required();
  lm_ppl->add_option("TEXT", ppl_text, "Text file")->required();
  lm_ppl->add_option("--oov", ppl_oov, "include: score <unk>; exclude: skip unknown tokens")
      ->capture_default_str();
  lm_ppl->add_flag("--pretokenized", ppl_pretokenized,
                   "Input holds one tokenized sentence per line");
  AddPrepFlags(lm_ppl, ppl_flags);

  // cer
  auto *cer = app.add_subcommand("cer", "Character error rate of a hypothesis");
  std::string cer_ref;
  std::string cer_hyp;
  std::string cer_pairs;
  bool cer_per_line = false;
  bool cer_case_fold = false;
  bool cer_whitespace = true;
  cer->add_option("REF", cer_ref, "Reference text file");
  cer->add_option("HYP", cer_hyp, "Hypothesis text file, line-aligned with REF")
      ;
  cer->add_option("--pairs", cer_pairs, "JSON-lines file of {\"ref\", \"hyp\"} records")
      ;
  cer->add_flag("--per-line", cer_per_line, "Also report every line or pair");
  cer->add_flag("--case-fold", cer_case_fold, "Compare case-folded text");
  cer->add_flag("--normalize-whitespace,!--no-normalize-whitespace", cer_whitespace,
                "Trim lines, collapse whitespace runs and skip blank lines")
      ->capture_default_str();

  // score
  auto *score = app.add_subcommand("score", "Compute quality metrics for one hypothesis");
  PrepFlags score_flags;
  std::string score_hyp;
  std::string score_lexicon;
  std::vector<std::string> score_ngrams;
  std::string score_lm;
  std::string score_oov = "include";
  std::string score_pppl;
  std::string score_pppl_hint;
  bool score_pretokenized = false;
  score->add_option("HYP", score_hyp, "Hypothesis text file")->required();
  score->add_option("--lexicon", score_lexicon, "Lexicon file");
  score->add_option("--ngrams", score_ngrams, "N-gram set file (repeatable)")
      ;
  score->add_option("--lm", score_lm, "ARPA model");
  score->add_option("--oov", score_oov, "OOV handling for PPL")->capture_default_str();
  score->add_option("--pppl", score_pppl, "Pseudo-perplexity scorer endpoint");
  score->add_option("--pppl-hint", score_pppl_hint, "model_hint sent to the scorer");
  score->add_flag("--pretokenized", score_pretokenized,
                  "Input holds one tokenized sentence per line");
  AddPrepFlags(score, score_flags);

  // study run
  auto *study = app.add_subcommand("study", "Ranking studies")->require_subcommand(1);
  auto *study_run = study->add_subcommand("run", "Run a study described by a TOML or JSON file");
  std::string study_config;
  std::string study_report;
  std::string study_tables;
  std::optional<std::size_t> study_jobs;
  std::optional<std::uint64_t> study_seed;
  study_run->add_option("CONFIG", study_config, "Study config")->required();
  study_run->add_option("--report", study_report, "JSON report path (default: config or stdout)");
  study_run->add_option("--tables", study_tables, "Text table path");
  study_run->add_option("--jobs", study_jobs, "Parallel metric cells (default: all cores)");
  study_run->add_option("--seed", study_seed, "Seed for all randomness (overrides the config)");

  // corrupt
  auto *corrupt = app.add_subcommand("corrupt", "Inject synthetic character errors");
  std::string corrupt_in;
  std::string corrupt_out;
  CorruptionSpec corrupt_spec;
  std::string corrupt_charset;
  corrupt->add_option("IN", corrupt_in, "Input text file")->required();
  corrupt->add_option("OUT", corrupt_out, "Output text file")->required();
  corrupt->add_option("--cer", corrupt_spec.target_cer, "Target CER in [0, 1)")->required();
  corrupt->add_option("--seed", corrupt_spec.seed, "Random seed")->capture_default_str();
  corrupt->add_option("--substitution", corrupt_spec.substitution_weight, "Substitution weight");
  corrupt->add_option("--insertion", corrupt_spec.insertion_weight, "Insertion weight");
  corrupt->add_option("--deletion", corrupt_spec.deletion_weight, "Deletion weight");
  corrupt->add_option("--charset", corrupt_charset,
                      "Replacement characters (default: those of the input)");

  // report render
  auto *report = app.add_subcommand("report", "Study reports")->require_subcommand(1);
  auto *report_render = report->add_subcommand("render", "Render JSON reports as text tables");
  std::vector<std::string> render_in;
  std::string render_out;
  report_render->add_option("REPORT", render_in, "Report files; one table column each")
      ->required();
  report_render->add_option("-o,--out", render_out, "Output file (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp &e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*prep) return RunPrep(prep_in, prep_out, prep_tokenize, prep_flags);

    if (*lexicon_build) {
      const PrepConfig cfg = lex_flags.Build();
      Lexicon lex = BuildLexicon(LoadReference(lex_in, lex_pretokenized, cfg));
      lex.prep_digest = cfg.Digest();
      std::ostringstream out;
      WriteLexicon(out, lex);
      WriteFile(lex_out, out.str());
      return kExitOk;
    }

    if (*ngrams_build) {
      const PrepConfig cfg = ng_flags.Build();
      const TokenizedText ref = LoadReference(ng_in, ng_pretokenized, cfg);
      const GramExtraction extraction = ParseGramExtraction(ng_extraction);
      for (int n : ng_orders) {
        NGramSet gs = BuildNGramSet(ref, n, extraction, ng_max_order);
        gs.prep_digest = cfg.Digest();
        std::ostringstream out;
        WriteNGramSet(out, gs);
        WriteFile(OrderPath(ng_out, n, ng_orders.size() > 1), out.str());
      }
      return kExitOk;
    }

    if (*lm_train) {
      const PrepConfig cfg = lm_flags.Build();
      KnOptions options;
      options.fallback_discount = lm_fallback;
      options.interpolate_unigrams = lm_interpolate;
      NGramModel model =
          TrainKneserNey(LoadReference(lm_in, lm_pretokenized, cfg), lm_order, options);
      model.metadata().prep_digest = cfg.Digest();
      WriteArpaFile(lm_out, model);
      return kExitOk;
    }

    if (*lm_ppl) {
      const PrepConfig cfg = ppl_flags.Build();
      const NGramModel model = ReadArpaFile(ppl_model);
      const auto r = Perplexity(model, LoadHypothesis(ppl_text, ppl_pretokenized, cfg),
                                ParseOovMode(ppl_oov));
      WriteJson({{"ppl", r.ppl},
                 {"cross_entropy", r.cross_entropy},
                 {"log2_prob_sum", r.log2_prob_sum},
                 {"token_count", r.token_count},
                 {"oov_count", r.oov_count},
                 {"oov_mode", ppl_oov}},
                "");
      return kExitOk;
    }

    if (*cer) {
      CerOptions options;
      options.case_fold = cer_case_fold;
      options.normalize_whitespace = cer_whitespace;
      nlohmann::json out;
      std::vector<CerResult> parts;
      if (!cer_pairs.empty()) {
        if (!cer_ref.empty()) throw CLI::ValidationError("--pairs excludes REF and HYP");
        std::vector<std::pair<std::string, std::string>> pairs;
        std::size_t line_no = 0;
        for (const auto &line : ReadLinesFromFile(cer_pairs)) {
          ++line_no;
          if (line.empty()) continue;
          const auto j = nlohmann::json::parse(line, nullptr, false);
          if (j.is_discarded() || !j.contains("ref") || !j.contains("hyp")) {
            throw IoError("line " + std::to_string(line_no) + " is not a {ref, hyp} record",
                          cer_pairs);
          }
          pairs.emplace_back(j.at("ref").get<std::string>(), j.at("hyp").get<std::string>());
        }
        parts = PerPairCer(pairs, options);
        out = CerResultToJson(Aggregate(parts));
      } else {
        if (cer_ref.empty() || cer_hyp.empty()) {
          throw CLI::ValidationError("cer needs REF and HYP, or --pairs");
        }
        const auto ref = ReadLinesFromFile(cer_ref);
        const auto hyp = ReadLinesFromFile(cer_hyp);
        out = CerResultToJson(AlignedCer(ref, hyp, options));
        if (cer_per_line && ref.size() == hyp.size()) {
          for (std::size_t i = 0; i < ref.size(); ++i) {
            const auto r = NormalizeForCer(ref[i], options);
            const auto h = NormalizeForCer(hyp[i], options);
            CerResult part{EditDistance(r, h), r.size(), 0.0};
            part.cer = r.empty() ? 0.0 : static_cast<double>(part.distance) / r.size();
            parts.push_back(part);
          }
        }
      }
      if (cer_per_line) {
        nlohmann::json lines = nlohmann::json::array();
        for (const auto &p : parts) {
          auto j = CerResultToJson(p);
          if (p.ref_len == 0) j["cer"] = nullptr;
          lines.push_back(j);
        }
        out["lines"] = lines;
      }
      out["normalization"] = options.ToJson();
      WriteJson(out, "");
      return kExitOk;
    }

    if (*score) {
      const PrepConfig cfg = score_flags.Build();
      StudyResources res;
      res.prep = cfg;
      if (!score_lexicon.empty()) {
        res.lexicon = LoadLexicon(score_lexicon);
      }
      for (const auto &path : score_ngrams) {
        res.ngram_sets.push_back(LoadNGramSet(path));
      }
      if (!score_lm.empty()) res.lm = ReadArpaFile(score_lm);
      res.oov_mode = ParseOovMode(score_oov);
      const std::string endpoint = ResolveEndpoint(score_pppl);
      if (!endpoint.empty()) {
        PpplResource pr;
        pr.endpoint = endpoint;
        if (!score_pppl_hint.empty()) pr.model_hint = score_pppl_hint;
        std::shared_ptr<const Lexicon> lex;
        if (res.lexicon) lex = std::make_shared<const Lexicon>(*res.lexicon);
        try {
          pr.scorer = MakeScorer(endpoint, lex);
        } catch (const TransportError &e) {
          pr.error = e.what();
        }
        res.pppl.push_back(std::move(pr));
      }
      if (EnabledMetrics(res).empty()) {
        throw CLI::ValidationError("score needs at least one of --lexicon, --ngrams, --lm, --pppl");
      }
      ModelOutput output;
      output.model_id = fs::path(score_hyp).stem().string();
      output.test_set_id = output.model_id;
      output.raw_lines = ReadLinesFromFile(score_hyp);
      output.text = score_pretokenized ? ReadTokenized(score_hyp)
                                       : Tokenize(RawCorpus{output.raw_lines, score_hyp}, cfg);
      output.prep_digest = cfg.Digest();
      const RankingStudy result = RunStudy(res, {output}, std::nullopt);
      nlohmann::json metrics = nlohmann::json::array();
      for (const auto &info : result.metrics) {
        const auto &cell = result.cells.at(info.metric_id).at(output.model_id);
        nlohmann::json m = {{"metric_id", info.metric_id},
                            {"direction", DirectionName(info.direction)}};
        if (cell.ok()) {
          m["value"] = *cell.value;
          if (!cell.detail.is_null()) m["detail"] = cell.detail;
        } else {
          m["error"] = cell.error;
        }
        metrics.push_back(m);
      }
      WriteJson({{"model_id", output.model_id}, {"metrics", metrics}}, "");
      for (const auto &[id, by_model] : result.cells) {
        for (const auto &[model, cell] : by_model) {
          if (!cell.ok()) std::cerr << "htrqe: " << id << ": " << cell.error << "\n";
        }
      }
      return result.FailedCells() > 0 ? kExitPartial : kExitOk;
    }

    if (*study_run) {
      StudyOverrides overrides;
      overrides.jobs = study_jobs;
      overrides.seed = study_seed;
      const StudySetup setup = PrepareStudy(study_config, overrides);
      const RankingStudy result = RunStudy(setup.resources, setup.outputs, setup.gt, setup.options);
      nlohmann::json report_json = StudyToJson(result);
      report_json["provenance"]["seed"] = setup.seed;
      const std::string text = DumpReport(report_json);
      std::string report_path = study_report;
      if (report_path.empty() && setup.report_path) report_path = setup.report_path->string();
      if (report_path.empty() || report_path == "-") {
        std::cout << text;
      } else {
        WriteFile(report_path, text);
      }
      std::string tables_path = study_tables;
      if (tables_path.empty() && setup.tables_path) tables_path = setup.tables_path->string();
      if (!tables_path.empty()) {
        const std::string tables = RenderTables({report_json});
        if (tables_path == "-") {
          std::cout << tables;
        } else {
          WriteFile(tables_path, tables);
        }
      }
      for (const auto &[id, by_model] : result.cells) {
        for (const auto &[model, cell] : by_model) {
          if (!cell.ok()) std::cerr << "htrqe: " << id << " on " << model << ": " << cell.error << "\n";
        }
      }
      return result.FailedCells() > 0 ? kExitPartial : kExitOk;
    }

    if (*corrupt) {
      if (!corrupt_charset.empty()) corrupt_spec.charset = unicode::Decode(corrupt_charset);
      const auto result = Corrupt(ReadLinesFromFile(corrupt_in), corrupt_spec);
      WriteLinesToFile(corrupt_out, result.lines);
      nlohmann::json out = {{"spec", corrupt_spec.ToJson()},
                            {"edits", result.edits},
                            {"realized", CerResultToJson(result.realized)}};
      WriteJson(out, "");
      return kExitOk;
    }

    if (*report_render) {
      std::vector<nlohmann::json> reports;
      for (const auto &path : render_in) {
        auto j = nlohmann::json::parse(ReadFile(path), nullptr, false);
        if (j.is_discarded()) throw IoError("invalid JSON", path);
        reports.push_back(std::move(j));
      }
      const std::string tables = RenderTables(reports);
      if (render_out.empty() || render_out == "-") {
        std::cout << tables;
      } else {
        WriteFile(render_out, tables);
      }
      return kExitOk;
    }
  } catch (const CLI::ValidationError &e) {
    std::cerr << "htrqe: " << e.what() << "\n";
    return kExitUsage;
  } catch (const IoError &e) {
    std::cerr << "htrqe: " << e.what() << "\n";
    return kExitData;
  } catch (const Error &e) {
    std::cerr << "htrqe: " << e.what() << "\n";
    return kExitData;
  } catch (const nlohmann::json::exception &e) {
    std::cerr << "htrqe: " << e.what() << "\n";
    return kExitData;
  } catch (const std::filesystem::filesystem_error &e) {
    std::cerr << "htrqe: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace htrqe::cli

int main(int argc, char **argv) { return htrqe::cli::Main(argc, argv); }
