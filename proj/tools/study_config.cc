// study_config.cc
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

#include "study_config.h"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#define TOML_EXCEPTIONS 1
#include <toml.hpp>

#include "htrqe/arpa.h"
#include "htrqe/error.h"
#include "htrqe/io.h"
#include "htrqe/unicode.h"

namespace htrqe::cli {
namespace {

namespace fs = std::filesystem;

void CheckKeys(const nlohmann::json &section, std::string_view where,
               std::initializer_list<std::string_view> allowed) {
  if (!section.is_object()) throw Error(std::string(where) + " must be a table");
  for (const auto &[key, value] : section.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw Error("unknown key '" + key + "' in " + std::string(where));
    }
  }
}

const nlohmann::json &Section(const nlohmann::json &doc, const char *key) {
  static const nlohmann::json kEmpty = nlohmann::json::object();
  const auto it = doc.find(key);
  return it == doc.end() ? kEmpty : *it;
}

template <typename T>
T Get(const nlohmann::json &j, const char *key, T fallback, std::string_view where) {
  const auto it = j.find(key);
  if (it == j.end()) return fallback;
  try {
    return it->get<T>();
  } catch (const nlohmann::json::exception &) {
    throw Error("key '" + std::string(key) + "' in " + std::string(where) + " has the wrong type");
  }
}

fs::path Resolve(const fs::path &base, const std::string &p) {
  fs::path path(p);
  return path.is_absolute() ? path : base / path;
}

std::vector<fs::path> PathList(const nlohmann::json &j, const char *key, const fs::path &base,
                               std::string_view where) {
  std::vector<fs::path> out;
  const auto it = j.find(key);
  if (it == j.end()) return out;
  if (it->is_string()) {
    out.push_back(Resolve(base, it->get<std::string>()));
    return out;
  }
  for (const auto &p : Get<std::vector<std::string>>(j, key, {}, where)) {
    out.push_back(Resolve(base, p));
  }
  return out;
}

void RequireFile(const fs::path &path) {
  if (!fs::is_regular_file(path)) throw IoError("no such file", path);
}

void CheckPrepDigest(const std::string &recorded, const std::string &expected,
                     const std::string &what) {
  if (!recorded.empty() && recorded != expected) {
    throw Error(what + " was built with a different preprocessing configuration (" + recorded +
                " vs " + expected + ")");
  }
}

}  // namespace

Lexicon LoadLexicon(const fs::path &path) {
  RequireFile(path);
  std::ifstream in(path, std::ios::binary);
  try {
    return ReadLexicon(in);
  } catch (const IoError &) {
    throw;
  } catch (const Error &e) {
    throw IoError(std::string("bad lexicon file (") + e.what() + ")", path);
  }
}

NGramSet LoadNGramSet(const fs::path &path) {
  RequireFile(path);
  std::ifstream in(path, std::ios::binary);
  try {
    return ReadNGramSet(in);
  } catch (const IoError &) {
    throw;
  } catch (const Error &e) {
    throw IoError(std::string("bad n-gram file (") + e.what() + ")", path);
  }
}

nlohmann::json LoadConfigDocument(const fs::path &path) {
  RequireFile(path);
  const std::string text = ReadFile(path);
  if (path.extension() == ".toml") {
    try {
      const toml::table table = toml::parse(text, path.string());
      std::ostringstream json;
      json << toml::json_formatter{table};
      return nlohmann::json::parse(json.str());
    } catch (const toml::parse_error &e) {
      std::ostringstream message;
      message << "invalid TOML at line " << e.source().begin.line << ": " << e.description();
      throw IoError(message.str(), path);
    }
  }
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception &e) {
    throw IoError(std::string("invalid JSON (") + e.what() + ")", path);
  }
}

std::vector<fs::path> ExpandInputs(const std::vector<fs::path> &paths) {
  std::vector<fs::path> out;
  for (const auto &p : paths) {
    if (fs::is_directory(p)) {
      std::vector<fs::path> files;
      for (const auto &entry : fs::directory_iterator(p)) {
        if (entry.is_regular_file() && entry.path().extension() == ".txt") {
          files.push_back(entry.path());
        }
      }
      std::sort(files.begin(), files.end());
      if (files.empty()) throw IoError("directory holds no .txt files", p);
      out.insert(out.end(), files.begin(), files.end());
    } else {
      RequireFile(p);
      out.push_back(p);
    }
  }
  return out;
}

RawCorpus ReadCorpus(const std::vector<fs::path> &paths) {
  RawCorpus corpus;
  for (const auto &path : ExpandInputs(paths)) {
    auto lines = ReadLinesFromFile(path);
    corpus.lines.insert(corpus.lines.end(), std::make_move_iterator(lines.begin()),
                        std::make_move_iterator(lines.end()));
    if (!corpus.source_id.empty()) corpus.source_id += ",";
    corpus.source_id += path.filename().string();
  }
  return corpus;
}

StudySetup PrepareStudy(const fs::path &config_path, const StudyOverrides &overrides) {
  const nlohmann::json doc = LoadConfigDocument(config_path);
  const fs::path base = config_path.parent_path().empty() ? fs::path(".")
                                                          : config_path.parent_path();
  CheckKeys(doc, "study config",
            {"test_set_id", "seed", "jobs", "prep", "resources", "metrics", "outputs",
             "ground_truth", "synthetic", "analysis", "output"});

  StudySetup setup;
  setup.seed = overrides.seed ? *overrides.seed : Get<std::uint64_t>(doc, "seed", 0, "study config");
  setup.options.jobs =
      overrides.jobs ? *overrides.jobs : Get<std::size_t>(doc, "jobs", 0, "study config");

  StudyResources &res = setup.resources;
  res.prep = PrepConfig::FromJson(Section(doc, "prep"));
  const std::string prep_digest = res.prep.Digest();

  const auto &metrics = Section(doc, "metrics");
  CheckKeys(metrics, "[metrics]",
            {"token_ratio", "ngram_orders", "ngram_extraction", "ppl", "pppl"});
  const bool want_token = Get<bool>(metrics, "token_ratio", true, "[metrics]");
  const auto orders = Get<std::vector<int>>(metrics, "ngram_orders", {2, 3, 4, 5, 6, 7}, "[metrics]");
  const GramExtraction extraction = ParseGramExtraction(
      Get<std::string>(metrics, "ngram_extraction", "within-token", "[metrics]"));
  const bool want_ppl = Get<bool>(metrics, "ppl", true, "[metrics]");
  const bool want_pppl = Get<bool>(metrics, "pppl", true, "[metrics]");

  const auto &resources = Section(doc, "resources");
  CheckKeys(resources, "[resources]",
            {"reference_corpus", "lexicon", "ngrams", "lm", "lm_order", "interpolate_unigrams",
             "oov", "fallback_discount", "pppl"});
  res.oov_mode = ParseOovMode(Get<std::string>(resources, "oov", "include", "[resources]"));

  std::optional<TokenizedText> reference;
  const auto corpus_paths = PathList(resources, "reference_corpus", base, "[resources]");
  if (!corpus_paths.empty()) {
    const RawCorpus raw = ReadCorpus(corpus_paths);
    reference = Tokenize(Clean(raw, res.prep), res.prep);
  }
  auto need_reference = [&](const char *what) -> const TokenizedText & {
    if (!reference) {
      throw Error(std::string("no ") + what +
                  " file given and no resources.reference_corpus to build it from");
    }
    return *reference;
  };

  if (want_token) {
    if (resources.contains("lexicon")) {
      res.lexicon = LoadLexicon(Resolve(base, resources.at("lexicon").get<std::string>()));
      CheckPrepDigest(res.lexicon->prep_digest, prep_digest, "lexicon");
    } else {
      res.lexicon = BuildLexicon(need_reference("lexicon"));
      res.lexicon->prep_digest = prep_digest;
    }
  }
  const auto ngram_files = PathList(resources, "ngrams", base, "[resources]");
  if (!ngram_files.empty()) {
    for (const auto &path : ngram_files) {
      res.ngram_sets.push_back(LoadNGramSet(path));
      CheckPrepDigest(res.ngram_sets.back().prep_digest, prep_digest, path.string());
    }
  } else if (!orders.empty()) {
    const TokenizedText &ref = need_reference("n-gram");
    for (int n : orders) {
      res.ngram_sets.push_back(BuildNGramSet(ref, n, extraction, std::max(n, kDefaultMaxGramOrder)));
      res.ngram_sets.back().prep_digest = prep_digest;
    }
  }
  if (want_ppl) {
    if (resources.contains("lm")) {
      const fs::path lm_path = Resolve(base, resources.at("lm").get<std::string>());
      RequireFile(lm_path);
      res.lm = ReadArpaFile(lm_path);
      CheckPrepDigest(res.lm->metadata().prep_digest, prep_digest, "language model");
    } else if (reference) {
      KnOptions kn;
      kn.fallback_discount = Get<double>(resources, "fallback_discount", 0.75, "[resources]");
      kn.interpolate_unigrams =
          Get<bool>(resources, "interpolate_unigrams", true, "[resources]");
      res.lm = TrainKneserNey(*reference, Get<int>(resources, "lm_order", 3, "[resources]"), kn);
      res.lm->metadata().prep_digest = prep_digest;
    } else {
      need_reference("language model");
    }
  }
  if (want_pppl && resources.contains("pppl")) {
    auto entries = resources.at("pppl");
    if (entries.is_object()) entries = nlohmann::json::array({entries});
    std::shared_ptr<const Lexicon> lexicon;
    if (res.lexicon) lexicon = std::make_shared<const Lexicon>(*res.lexicon);
    for (const auto &entry : entries) {
      CheckKeys(entry, "[[resources.pppl]]",
                {"endpoint", "model_hint", "timeout_ms", "max_in_flight", "max_batch"});
      PpplResource pr;
      pr.endpoint = ResolveEndpoint(Get<std::string>(entry, "endpoint", "", "[[resources.pppl]]"));
      if (pr.endpoint.empty()) throw Error("[[resources.pppl]] needs an endpoint");
      if (entry.contains("model_hint")) pr.model_hint = entry.at("model_hint").get<std::string>();
      TransportOptions transport;
      transport.timeout = std::chrono::milliseconds(
          Get<std::int64_t>(entry, "timeout_ms", 30000, "[[resources.pppl]]"));
      transport.max_in_flight = Get<std::size_t>(entry, "max_in_flight", 16, "[[resources.pppl]]");
      transport.max_batch = Get<std::size_t>(entry, "max_batch", 256, "[[resources.pppl]]");
      if (pr.endpoint.starts_with("stub:lexical") && !lexicon) {
        lexicon = std::make_shared<const Lexicon>(BuildLexicon(need_reference("lexicon")));
      }
      try {
        pr.scorer = MakeScorer(pr.endpoint, lexicon, transport);
      } catch (const TransportError &e) {
        pr.error = e.what();
      }
      res.pppl.push_back(std::move(pr));
    }
  }

  const std::string test_set_id =
      Get<std::string>(doc, "test_set_id", config_path.stem().string(), "study config");
  const bool has_outputs = doc.contains("outputs");
  const bool has_synthetic = doc.contains("synthetic");
  if (has_outputs == has_synthetic) {
    throw Error("a study config needs exactly one of [[outputs]] and [synthetic]");
  }

  const auto &gt_section = Section(doc, "ground_truth");
  CheckKeys(gt_section, "[ground_truth]", {"path", "normalize_whitespace", "case_fold"});
  CerOptions cer_options;
  cer_options.normalize_whitespace =
      Get<bool>(gt_section, "normalize_whitespace", true, "[ground_truth]");
  cer_options.case_fold = Get<bool>(gt_section, "case_fold", false, "[ground_truth]");

  if (has_outputs) {
    for (const auto &entry : doc.at("outputs")) {
      CheckKeys(entry, "[[outputs]]", {"model_id", "path"});
      const auto id = Get<std::string>(entry, "model_id", "", "[[outputs]]");
      const auto p = Get<std::string>(entry, "path", "", "[[outputs]]");
      if (id.empty() || p.empty()) throw Error("every [[outputs]] entry needs model_id and path");
      const fs::path path = Resolve(base, p);
      RequireFile(path);
      setup.outputs.push_back(MakeModelOutput(id, test_set_id, ReadLinesFromFile(path), res.prep));
    }
    if (gt_section.contains("path")) {
      const fs::path path = Resolve(base, gt_section.at("path").get<std::string>());
      RequireFile(path);
      setup.gt = GroundTruth{ReadLinesFromFile(path), cer_options};
    }
  } else {
    const auto &syn = doc.at("synthetic");
    CheckKeys(syn, "[synthetic]", {"text", "levels", "weights", "charset"});
    const auto texts = PathList(syn, "text", base, "[synthetic]");
    if (texts.empty()) throw Error("[synthetic] needs a text");
    const std::vector<std::string> lines = ReadCorpus(texts).lines;
    CorruptionSpec spec;
    if (syn.contains("weights")) {
      const auto &w = syn.at("weights");
      CheckKeys(w, "[synthetic.weights]", {"substitution", "insertion", "deletion"});
      spec.substitution_weight = Get<double>(w, "substitution", 0.0, "[synthetic.weights]");
      spec.insertion_weight = Get<double>(w, "insertion", 0.0, "[synthetic.weights]");
      spec.deletion_weight = Get<double>(w, "deletion", 0.0, "[synthetic.weights]");
    }
    if (syn.contains("charset")) {
      spec.charset = unicode::Decode(syn.at("charset").get<std::string>());
    }
    const auto levels = Get<std::vector<double>>(syn, "levels", {}, "[synthetic]");
    for (auto &model : CorruptSeries(lines, levels, setup.seed, res.prep, test_set_id, spec)) {
      setup.outputs.push_back(std::move(model.output));
    }
    setup.gt = GroundTruth{lines, cer_options};
  }

  const auto &analysis = Section(doc, "analysis");
  CheckKeys(analysis, "[analysis]", {"degrees", "alternative", "top_n", "anova_top"});
  setup.options.degrees = Get<std::vector<int>>(analysis, "degrees", {1, 2, 3, 4}, "[analysis]");
  setup.options.alternative =
      ParseAlternative(Get<std::string>(analysis, "alternative", "two-sided", "[analysis]"));
  setup.options.top_n = Get<std::vector<int>>(analysis, "top_n", {1, 3, 5}, "[analysis]");
  setup.options.anova_top = Get<std::size_t>(analysis, "anova_top", 5, "[analysis]");

  const auto &output = Section(doc, "output");
  CheckKeys(output, "[output]", {"report", "tables"});
  if (output.contains("report")) {
    setup.report_path = Resolve(base, output.at("report").get<std::string>());
  }
  if (output.contains("tables")) {
    setup.tables_path = Resolve(base, output.at("tables").get<std::string>());
  }
  return setup;
}

}  // namespace htrqe::cli
