// study_config.h
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
// Study configuration files. A study is described by one TOML (.toml) or
// JSON (any other extension) document; relative paths inside it resolve
// against the directory holding the document.
//
//   test_set_id = "winters_tale"
//   seed = 7
//
//   [prep]                      # PrepConfig fields
//   charset = "latin"
//
//   [resources]
//   reference_corpus = ["corpus/"]   # files or directories of *.txt
//   lexicon = "lexicon.txt"          # or prebuilt resources
//   ngrams = ["g2.txt", "g3.txt"]
//   lm = "model.arpa"
//   lm_order = 3
//   interpolate_unigrams = true
//   oov = "include"
//   [[resources.pppl]]
//   endpoint = "stub:lexical"
//
//   [metrics]
//   token_ratio = true
//   ngram_orders = [2, 3, 4, 5, 6, 7]
//   ngram_extraction = "within-token"
//   ppl = true
//   pppl = true
//
//   [[outputs]]                 # either outputs ...
//   model_id = "m1"
//   path = "m1.txt"
//   [ground_truth]
//   path = "gt.txt"
//
//   [synthetic]                 # ... or a corruption series
//   text = "gt.txt"
//   levels = [0.0, 0.05, 0.1]
//
//   [analysis]
//   degrees = [1, 2, 3, 4]
//   alternative = "two-sided"
//
//   [output]
//   report = "report.json"
//   tables = "tables.txt"

#ifndef HTRQE_TOOLS_STUDY_CONFIG_H_
#define HTRQE_TOOLS_STUDY_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include <nlohmann/json.hpp>

#include "htrqe/harness.h"
#include "htrqe/lexmetrics.h"
#include "htrqe/textprep.h"

namespace htrqe::cli {

// Parses a TOML or JSON document into JSON. Throws IoError or Error.
nlohmann::json LoadConfigDocument(const std::filesystem::path &path);

// Read resource files; format errors become IoError naming the path.
Lexicon LoadLexicon(const std::filesystem::path &path);
NGramSet LoadNGramSet(const std::filesystem::path &path);

// Expands directories into their *.txt files in sorted order. Throws IoError
// for a path that does not exist.
std::vector<std::filesystem::path> ExpandInputs(const std::vector<std::filesystem::path> &paths);

RawCorpus ReadCorpus(const std::vector<std::filesystem::path> &paths);

struct StudyOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> jobs;
};

struct StudySetup {
  StudyResources resources;
  std::vector<ModelOutput> outputs;
  std::optional<GroundTruth> gt;
  StudyOptions options;
  std::uint64_t seed = 0;
  std::optional<std::filesystem::path> report_path;
  std::optional<std::filesystem::path> tables_path;
};

StudySetup PrepareStudy(const std::filesystem::path &config_path,
                        const StudyOverrides &overrides = {});

}  // namespace htrqe::cli

#endif  // HTRQE_TOOLS_STUDY_CONFIG_H_
