// pppl.cc
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

#include "htrqe/pppl.h"

#include <cmath>
#include <cstdlib>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "htrqe/io.h"
#include "htrqe/unicode.h"

namespace htrqe {
namespace {

nlohmann::json ParseObject(std::string_view line, std::string_view what) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception &e) {
    throw ProtocolError("malformed " + std::string(what) + ": " + e.what());
  }
  if (!j.is_object()) throw ProtocolError(std::string(what) + " is not a JSON object");
  return j;
}

std::string RequireString(const nlohmann::json &j, const char *key, std::string_view what) {
  const auto it = j.find(key);
  if (it == j.end() || !it->is_string()) {
    throw ProtocolError(std::string(what) + " lacks string field \"" + key + "\"");
  }
  return it->get<std::string>();
}

std::vector<std::string> WhitespaceTokens(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  for (char32_t c : unicode::Decode(text)) {
    if (unicode::IsWhitespace(c)) {
      if (!current.empty()) tokens.push_back(std::move(current));
      current.clear();
    } else {
      current += unicode::Encode(c);
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

}  // namespace

nlohmann::json ToJson(const PpplRequest &request) {
  nlohmann::json j = {{"id", request.id}, {"text", request.text}};
  j["model_hint"] = request.model_hint ? nlohmann::json(*request.model_hint)
                                       : nlohmann::json(nullptr);
  return j;
}

nlohmann::json ToJson(const PpplResponse &response) {
  if (response.error) return {{"id", response.id}, {"error", *response.error}};
  return {{"id", response.id},
          {"pppl", response.pppl},
          {"token_count", response.token_count},
          {"log_prob_sum", response.log_prob_sum}};
}

nlohmann::json ToJson(const PpplHandshake &handshake) {
  return {{"protocol", handshake.protocol}, {"models", handshake.models}};
}

PpplRequest ParseRequest(std::string_view line) {
  const auto j = ParseObject(line, "request");
  PpplRequest request;
  request.id = RequireString(j, "id", "request");
  request.text = RequireString(j, "text", "request");
  if (const auto it = j.find("model_hint"); it != j.end() && !it->is_null()) {
    if (!it->is_string()) throw ProtocolError("request model_hint must be a string or null");
    request.model_hint = it->get<std::string>();
  }
  return request;
}

PpplResponse ParseResponse(std::string_view line) {
  const auto j = ParseObject(line, "response");
  PpplResponse response;
  response.id = RequireString(j, "id", "response");
  if (j.contains("error")) {
    const auto &e = j.at("error");
    response.error = e.is_string() ? e.get<std::string>() : e.dump();
    return response;
  }
  const auto pppl = j.find("pppl");
  const auto count = j.find("token_count");
  const auto sum = j.find("log_prob_sum");
  if (pppl == j.end() || !pppl->is_number()) {
    throw ProtocolError("response '" + response.id + "' lacks numeric \"pppl\"");
  }
  if (count == j.end() || !count->is_number_unsigned()) {
    throw ProtocolError("response '" + response.id +
                        "' lacks non-negative integer \"token_count\"");
  }
  if (sum == j.end() || !sum->is_number()) {
    throw ProtocolError("response '" + response.id + "' lacks numeric \"log_prob_sum\"");
  }
  response.pppl = pppl->get<double>();
  response.token_count = count->get<std::size_t>();
  response.log_prob_sum = sum->get<double>();
  return response;
}

PpplHandshake ParseHandshake(std::string_view line) {
  const auto j = ParseObject(line, "handshake");
  PpplHandshake handshake;
  handshake.protocol = RequireString(j, "protocol", "handshake");
  if (handshake.protocol != kPpplProtocol) {
    throw ProtocolError("unsupported protocol '" + handshake.protocol + "', expected " +
                        std::string(kPpplProtocol));
  }
  const auto models = j.find("models");
  if (models == j.end() || !models->is_array()) {
    throw ProtocolError("handshake lacks array field \"models\"");
  }
  for (const auto &m : *models) {
    if (!m.is_string()) throw ProtocolError("handshake models must be strings");
    handshake.models.push_back(m.get<std::string>());
  }
  return handshake;
}

PpplResponse MakeResponse(std::string id, std::size_t token_count, double log_prob_sum) {
  PpplResponse response;
  response.id = std::move(id);
  response.token_count = token_count;
  response.log_prob_sum = log_prob_sum;
  response.pppl = std::exp(-log_prob_sum / static_cast<double>(token_count));
  return response;
}

PpplResponse MakeErrorResponse(std::string id, std::string error) {
  PpplResponse response;
  response.id = std::move(id);
  response.error = std::move(error);
  return response;
}

bool SatisfiesIdentity(const PpplResponse &response) {
  if (!response.ok() || response.token_count == 0) return false;
  if (!std::isfinite(response.pppl) || !std::isfinite(response.log_prob_sum)) return false;
  const double expected =
      std::exp(-response.log_prob_sum / static_cast<double>(response.token_count));
  return std::fabs(response.pppl - expected) <=
         kPpplIdentityTolerance * std::max(1.0, std::fabs(expected));
}

void ValidateBatch(std::span<const PpplRequest> requests) {
  if (requests.empty()) throw Error("empty PPPL batch");
  std::unordered_set<std::string_view> ids;
  for (const auto &request : requests) {
    if (!ids.insert(request.id).second) {
      throw Error("duplicate request id '" + request.id + "' in PPPL batch");
    }
  }
}

std::vector<PpplResponse> ScoreBatch(PpplScorer &scorer,
                                     std::span<const PpplRequest> requests) {
  ValidateBatch(requests);
  std::vector<PpplRequest> outgoing;
  for (const auto &request : requests) {
    if (!request.text.empty()) outgoing.push_back(request);
  }
  std::unordered_map<std::string, PpplResponse> by_id;
  if (!outgoing.empty()) {
    for (auto &response : scorer.ScoreBatch(outgoing)) {
      std::string id = response.id;
      by_id.emplace(std::move(id), std::move(response));
    }
  }
  std::vector<PpplResponse> results;
  results.reserve(requests.size());
  for (const auto &request : requests) {
    if (request.text.empty()) {
      results.push_back(MakeErrorResponse(request.id, "empty_text"));
      continue;
    }
    auto it = by_id.find(request.id);
    if (it == by_id.end()) {
      results.push_back(MakeErrorResponse(request.id, "no response from scorer"));
    } else if (it->second.ok() && !SatisfiesIdentity(it->second)) {
      results.push_back(MakeErrorResponse(
          request.id, "response violates pppl = exp(-log_prob_sum / token_count)"));
    } else {
      results.push_back(std::move(it->second));
    }
  }
  return results;
}

std::string_view StubRuleName(StubRule rule) {
  return rule == StubRule::kUnit ? "unit" : "lexical";
}

StubRule ParseStubRule(std::string_view name) {
  if (name == "unit") return StubRule::kUnit;
  if (name == "lexical") return StubRule::kLexical;
  throw Error("unknown stub rule '" + std::string(name) + "'");
}

StubScorer::StubScorer(StubRule rule, std::shared_ptr<const Lexicon> lexicon)
    : rule_(rule), lexicon_(std::move(lexicon)) {
  if (rule_ == StubRule::kLexical && !lexicon_) {
    throw Error("the lexical stub scorer needs a lexicon");
  }
  handshake_.models = {"stub-" + std::string(StubRuleName(rule_))};
}

std::string StubScorer::endpoint() const { return "stub:" + std::string(StubRuleName(rule_)); }

PpplResponse StubScorer::Score(const PpplRequest &request) const {
  if (unicode::FindInvalidUtf8(request.text) != unicode::kValidUtf8) {
    return MakeErrorResponse(request.id, "invalid_utf8");
  }
  const auto tokens = WhitespaceTokens(request.text);
  if (tokens.empty()) return MakeErrorResponse(request.id, "empty_text");
  double sum = 0.0;
  for (const auto &token : tokens) {
    if (rule_ == StubRule::kUnit || lexicon_->Contains(token)) {
      sum -= 1.0;
    } else {
      sum -= 5.0;
    }
  }
  return MakeResponse(request.id, tokens.size(), sum);
}

std::vector<PpplResponse> StubScorer::ScoreBatch(std::span<const PpplRequest> requests) {
  std::vector<PpplResponse> responses;
  responses.reserve(requests.size());
  for (const auto &request : requests) responses.push_back(Score(request));
  return responses;
}

std::unique_ptr<PpplScorer> MakeScorer(std::string_view endpoint,
                                       std::shared_ptr<const Lexicon> lexicon,
                                       TransportOptions options) {
  if (endpoint.starts_with("stub:")) {
    return std::make_unique<StubScorer>(ParseStubRule(endpoint.substr(5)), std::move(lexicon));
  }
  if (endpoint.starts_with("exec:")) {
    std::vector<std::string> argv;
    std::istringstream words{std::string(endpoint.substr(5))};
    for (std::string word; words >> word;) argv.push_back(word);
    if (argv.empty()) throw Error("exec endpoint names no program");
    return std::make_unique<ExecScorer>(std::move(argv), options);
  }
  if (endpoint.starts_with("http://")) {
    return std::make_unique<HttpScorer>(std::string(endpoint), options);
  }
  throw Error("unsupported scorer endpoint '" + std::string(endpoint) + "'");
}

std::string ResolveEndpoint(std::string_view configured) {
  const char *env = std::getenv(std::string(kPpplEndpointEnv).c_str());
  if (env != nullptr && *env != '\0') return env;
  return std::string(configured);
}

namespace {

PpplResponse AnswerLine(std::string_view line, PpplScorer &scorer) {
  PpplRequest request;
  try {
    request = ParseRequest(line);
  } catch (const ProtocolError &e) {
    std::string id;
    try {
      const auto j = nlohmann::json::parse(line);
      if (j.is_object() && j.contains("id") && j["id"].is_string()) id = j["id"];
    } catch (const nlohmann::json::exception &) {
    }
    return MakeErrorResponse(std::move(id), e.what());
  }
  if (request.text.empty()) return MakeErrorResponse(request.id, "empty_text");
  auto responses = scorer.ScoreBatch(std::span<const PpplRequest>(&request, 1));
  if (responses.size() != 1) return MakeErrorResponse(request.id, "scorer returned no result");
  return std::move(responses.front());
}

}  // namespace

void ServeNdjson(std::istream &in, std::ostream &out, PpplScorer &scorer) {
  out << ToJson(scorer.handshake()).dump() << '\n' << std::flush;
  for (std::string line; std::getline(in, line);) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    out << ToJson(AnswerLine(line, scorer)).dump() << '\n' << std::flush;
  }
}

std::string ScoreNdjsonBody(std::string_view body, PpplScorer &scorer) {
  std::string out;
  std::istringstream in{std::string(body)};
  for (const auto &line : ReadLines(in)) {
    if (line.empty()) continue;
    out += ToJson(AnswerLine(line, scorer)).dump();
    out += '\n';
  }
  return out;
}

DocumentPppl AggregatePppl(std::span<const PpplResponse> responses) {
  DocumentPppl doc;
  for (const auto &response : responses) {
    if (!response.ok()) {
      throw Error("PPPL item '" + response.id + "' failed: " + *response.error);
    }
    doc.token_count += response.token_count;
    doc.log_prob_sum += response.log_prob_sum;
    ++doc.items;
  }
  if (doc.token_count == 0) throw UndefinedError("PPPL is undefined without scored tokens");
  doc.pppl = std::exp(-doc.log_prob_sum / static_cast<double>(doc.token_count));
  return doc;
}

std::vector<PpplRequest> SentenceRequests(const TokenizedText &text,
                                          std::string_view id_prefix,
                                          const std::optional<std::string> &model_hint) {
  std::vector<PpplRequest> requests;
  requests.reserve(text.sentences.size());
  for (std::size_t i = 0; i < text.sentences.size(); ++i) {
    requests.push_back(
        {std::string(id_prefix) + "#" + std::to_string(i), text.SentenceText(i), model_hint});
  }
  return requests;
}

DocumentPppl ScoreDocument(PpplScorer &scorer, const TokenizedText &text,
                           std::string_view id_prefix,
                           const std::optional<std::string> &model_hint) {
  if (text.sentences.empty()) throw UndefinedError("PPPL is undefined for an empty text");
  const auto requests = SentenceRequests(text, id_prefix, model_hint);
  const auto responses = ScoreBatch(scorer, requests);
  return AggregatePppl(responses);
}

}  // namespace htrqe
