// pppl.h
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
// Client side of the pppl/1 pseudo-perplexity scoring protocol.
//
// Records are single-line JSON objects:
//
//   handshake  {"protocol":"pppl/1","models":[...]}
//   request    {"id":...,"text":...,"model_hint":...|null}
//   response   {"id":...,"pppl":...,"token_count":...,"log_prob_sum":...}
//              {"id":...,"error":...}
//
// log_prob_sum uses natural logarithms, so pppl = exp(-log_prob_sum /
// token_count). A subprocess scorer writes the handshake on startup and then
// answers each request line, in any order. An HTTP scorer serves the
// handshake at GET <base>/handshake and answers an NDJSON request body
// POSTed to <base>/score with an NDJSON response body.

#ifndef HTRQE_PPPL_H_
#define HTRQE_PPPL_H_

#include <chrono>
#include <cstddef>
#include <istream>
#include <memory>
#include <mutex>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "htrqe/error.h"
#include "htrqe/lexmetrics.h"
#include "htrqe/textprep.h"

namespace htrqe {

inline constexpr std::string_view kPpplProtocol = "pppl/1";
inline constexpr std::string_view kPpplEndpointEnv = "HTRQE_PPPL_ENDPOINT";
inline constexpr double kPpplIdentityTolerance = 1e-6;

// The scorer could not be reached, timed out or closed the connection.
class TransportError : public Error {
 public:
  using Error::Error;
};

// A record violates the pppl/1 schema.
class ProtocolError : public Error {
 public:
  using Error::Error;
};

struct PpplRequest {
  std::string id;
  std::string text;
  std::optional<std::string> model_hint;
};

struct PpplResponse {
  std::string id;
  double pppl = 0.0;
  std::size_t token_count = 0;
  double log_prob_sum = 0.0;
  std::optional<std::string> error;

  bool ok() const { return !error.has_value(); }
};

struct PpplHandshake {
  std::string protocol = std::string(kPpplProtocol);
  std::vector<std::string> models;
};

nlohmann::json ToJson(const PpplRequest &request);
nlohmann::json ToJson(const PpplResponse &response);
nlohmann::json ToJson(const PpplHandshake &handshake);

// Each throws ProtocolError on a malformed line.
PpplRequest ParseRequest(std::string_view line);
PpplResponse ParseResponse(std::string_view line);
PpplHandshake ParseHandshake(std::string_view line);

// A successful response, with pppl derived from the sums.
PpplResponse MakeResponse(std::string id, std::size_t token_count, double log_prob_sum);
PpplResponse MakeErrorResponse(std::string id, std::string error);

// Whether a successful response satisfies pppl = exp(-log_prob_sum /
// token_count) within kPpplIdentityTolerance (relative).
bool SatisfiesIdentity(const PpplResponse &response);

// Transport to one scorer. Implementations are safe to call from several
// threads; calls are serialized.
class PpplScorer {
 public:
  virtual ~PpplScorer() = default;

  virtual const PpplHandshake &handshake() const = 0;
  // One response per request, in request order. Throws TransportError when
  // the scorer fails as a whole.
  virtual std::vector<PpplResponse> ScoreBatch(std::span<const PpplRequest> requests) = 0;
  virtual std::string endpoint() const = 0;
};

// Validates a batch before it is sent: non-empty, unique ids. Throws Error.
void ValidateBatch(std::span<const PpplRequest> requests);

// A batch through `scorer`, with validation on both sides. Empty texts are
// answered locally with a per-item error; responses that break the pppl
// identity are turned into per-item errors.
std::vector<PpplResponse> ScoreBatch(PpplScorer &scorer,
                                     std::span<const PpplRequest> requests);

// Deterministic in-process scorer. Tokens are whitespace-separated words.
//   unit     every token has log probability -1, so pppl = e
//   lexical  -1 for tokens in the lexicon, -5 otherwise
enum class StubRule { kUnit, kLexical };

std::string_view StubRuleName(StubRule rule);
StubRule ParseStubRule(std::string_view name);

class StubScorer : public PpplScorer {
 public:
  explicit StubScorer(StubRule rule, std::shared_ptr<const Lexicon> lexicon = nullptr);

  const PpplHandshake &handshake() const override { return handshake_; }
  std::vector<PpplResponse> ScoreBatch(std::span<const PpplRequest> requests) override;
  std::string endpoint() const override;

  PpplResponse Score(const PpplRequest &request) const;

 private:
  StubRule rule_;
  std::shared_ptr<const Lexicon> lexicon_;
  PpplHandshake handshake_;
};

struct TransportOptions {
  std::size_t max_in_flight = 16;
  std::size_t max_batch = 256;  // records per HTTP request
  std::chrono::milliseconds timeout{30000};
};

// Spawns `argv` and speaks the protocol over its stdin and stdout. Throws
// TransportError if the process cannot be started or sends no handshake.
class ExecScorer : public PpplScorer {
 public:
  ExecScorer(std::vector<std::string> argv, TransportOptions options = {});
  ~ExecScorer() override;
  ExecScorer(const ExecScorer &) = delete;
  ExecScorer &operator=(const ExecScorer &) = delete;

  const PpplHandshake &handshake() const override { return handshake_; }
  std::vector<PpplResponse> ScoreBatch(std::span<const PpplRequest> requests) override;
  std::string endpoint() const override;

 private:
  struct Process;
  std::unique_ptr<Process> process_;
  std::vector<std::string> argv_;
  TransportOptions options_;
  PpplHandshake handshake_;
  std::mutex mutex_;
};

// POSTs NDJSON batches to <base>/score. Throws TransportError if the
// handshake cannot be fetched.
class HttpScorer : public PpplScorer {
 public:
  explicit HttpScorer(std::string base_url, TransportOptions options = {});
  ~HttpScorer() override;

  const PpplHandshake &handshake() const override { return handshake_; }
  std::vector<PpplResponse> ScoreBatch(std::span<const PpplRequest> requests) override;
  std::string endpoint() const override { return base_url_; }

 private:
  struct Client;
  std::unique_ptr<Client> client_;
  std::string base_url_;
  std::string path_prefix_;
  TransportOptions options_;
  PpplHandshake handshake_;
  std::mutex mutex_;
};

// Endpoint syntax:
//   stub:unit | stub:lexical           in-process StubScorer
//   exec:<program> [args...]           subprocess, args split on whitespace
//   http://host[:port][/base]          HTTP
// The lexicon is used by stub:lexical only.
std::unique_ptr<PpplScorer> MakeScorer(std::string_view endpoint,
                                       std::shared_ptr<const Lexicon> lexicon = nullptr,
                                       TransportOptions options = {});

// The value of HTRQE_PPPL_ENDPOINT if set and non-empty, else `configured`.
std::string ResolveEndpoint(std::string_view configured);

// Answers newline-delimited requests from `in` on `out`, starting with the
// handshake. Malformed lines get an error response with an empty id.
void ServeNdjson(std::istream &in, std::ostream &out, PpplScorer &scorer);

// Scores an NDJSON request body and returns the NDJSON response body.
std::string ScoreNdjsonBody(std::string_view body, PpplScorer &scorer);

struct DocumentPppl {
  double pppl = 0.0;
  std::size_t token_count = 0;
  double log_prob_sum = 0.0;
  std::size_t items = 0;
};

// exp(-sum(log_prob_sum) / sum(token_count)). Throws Error naming the first
// failed item, UndefinedError when no tokens were scored.
DocumentPppl AggregatePppl(std::span<const PpplResponse> responses);

// One request per sentence, with ids "<id_prefix>#<sentence index>".
std::vector<PpplRequest> SentenceRequests(const TokenizedText &text,
                                          std::string_view id_prefix,
                                          const std::optional<std::string> &model_hint);

DocumentPppl ScoreDocument(PpplScorer &scorer, const TokenizedText &text,
                           std::string_view id_prefix,
                           const std::optional<std::string> &model_hint = std::nullopt);

}  // namespace htrqe

#endif  // HTRQE_PPPL_H_
