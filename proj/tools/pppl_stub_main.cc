// pppl_stub_main.cc
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
// htrqe-pppl-stub: a deterministic pppl/1 scorer speaking NDJSON on
// stdin/stdout, for tests and for running studies without a masked LM.

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "htrqe/error.h"
#include "htrqe/lexmetrics.h"
#include "htrqe/pppl.h"

namespace htrqe {
namespace {

// Adds fault injection around a scorer.
class FaultyScorer : public PpplScorer {
 public:
  FaultyScorer(std::unique_ptr<PpplScorer> inner, std::string fail_on, int delay_ms,
               long exit_after)
      : inner_(std::move(inner)),
        fail_on_(std::move(fail_on)),
        delay_ms_(delay_ms),
        exit_after_(exit_after) {}

  const PpplHandshake &handshake() const override { return inner_->handshake(); }
  std::string endpoint() const override { return inner_->endpoint(); }

  std::vector<PpplResponse> ScoreBatch(std::span<const PpplRequest> requests) override {
    if (exit_after_ >= 0 && served_ >= exit_after_) {
      std::cout.flush();
      std::_Exit(1);
    }
    served_ += static_cast<long>(requests.size());
    if (delay_ms_ > 0) std::this_thread::sleep_for(std::chrono::milliseconds(delay_ms_));
    auto responses = inner_->ScoreBatch(requests);
    for (std::size_t i = 0; i < requests.size(); ++i) {
      if (!fail_on_.empty() && requests[i].text.find(fail_on_) != std::string::npos) {
        responses[i] = MakeErrorResponse(requests[i].id, "injected failure");
      }
    }
    return responses;
  }

 private:
  std::unique_ptr<PpplScorer> inner_;
  std::string fail_on_;
  int delay_ms_;
  long exit_after_;
  long served_ = 0;
};

int Main(int argc, char **argv) {
  CLI::App app{"Deterministic pppl/1 scorer on stdin/stdout", "htrqe-pppl-stub"};
  std::string rule = "unit";
  std::string lexicon_path;
  std::string fail_on;
  int delay_ms = 0;
  long exit_after = -1;
  app.add_option("--rule", rule, "unit or lexical")->capture_default_str();
  app.add_option("--lexicon", lexicon_path, "Lexicon file for the lexical rule")
      ->check(CLI::ExistingFile);
  app.add_option("--fail-on", fail_on, "Answer with an error for texts containing this");
  app.add_option("--delay-ms", delay_ms, "Sleep before every response");
  app.add_option("--exit-after", exit_after, "Exit after answering this many requests");
  CLI11_PARSE(app, argc, argv);

  try {
    std::shared_ptr<const Lexicon> lexicon;
    if (!lexicon_path.empty()) {
      std::ifstream in(lexicon_path, std::ios::binary);
      lexicon = std::make_shared<const Lexicon>(ReadLexicon(in));
    }
    FaultyScorer scorer(std::make_unique<StubScorer>(ParseStubRule(rule), lexicon), fail_on,
                        delay_ms, exit_after);
    ServeNdjson(std::cin, std::cout, scorer);
  } catch (const std::exception &e) {
    std::cerr << "htrqe-pppl-stub: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

}  // namespace
}  // namespace htrqe

int main(int argc, char **argv) { return htrqe::Main(argc, argv); }
