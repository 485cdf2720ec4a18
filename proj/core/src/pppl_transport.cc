// pppl_transport.cc
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

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <thread>
#include <unordered_map>

#include <httplib.h>

#include "htrqe/pppl.h"

extern char **environ;

namespace htrqe {
namespace {

using Clock = std::chrono::steady_clock;

int RemainingMs(Clock::time_point deadline) {
  const auto left =
      std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now()).count();
  return left > 0 ? static_cast<int>(left) : 0;
}

}  // namespace

struct ExecScorer::Process {
  pid_t pid = -1;
  int to_child = -1;
  int from_child = -1;
  std::string buffer;
  bool broken = false;

  ~Process() {
    if (to_child >= 0) close(to_child);
    if (from_child >= 0) close(from_child);
    if (pid <= 0) return;
    for (int i = 0; i < 100; ++i) {
      if (waitpid(pid, nullptr, WNOHANG) == pid) return;
      std::this_thread::sleep_for(std::chrono::milliseconds(10));
    }
    kill(pid, SIGKILL);
    waitpid(pid, nullptr, 0);
  }

  void WriteAll(std::string_view data, Clock::time_point deadline) {
    while (!data.empty()) {
      const ssize_t n = write(to_child, data.data(), data.size());
      if (n > 0) {
        data.remove_prefix(static_cast<std::size_t>(n));
        continue;
      }
      if (n < 0 && errno == EINTR) continue;
      if (n < 0 && (errno == EAGAIN || errno == EWOULDBLOCK)) {
        pollfd p{to_child, POLLOUT, 0};
        const int ready = poll(&p, 1, RemainingMs(deadline));
        if (ready == 0) throw TransportError("timed out writing to scorer");
        if (ready < 0 && errno != EINTR) {
          throw TransportError(std::string("poll failed: ") + std::strerror(errno));
        }
        continue;
      }
      throw TransportError(std::string("cannot write to scorer: ") + std::strerror(errno));
    }
  }

  std::string ReadLine(Clock::time_point deadline) {
    while (true) {
      const auto newline = buffer.find('\n');
      if (newline != std::string::npos) {
        std::string line = buffer.substr(0, newline);
        buffer.erase(0, newline + 1);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        return line;
      }
      pollfd p{from_child, POLLIN, 0};
      const int ready = poll(&p, 1, RemainingMs(deadline));
      if (ready == 0) throw TransportError("timed out waiting for scorer");
      if (ready < 0) {
        if (errno == EINTR) continue;
        throw TransportError(std::string("poll failed: ") + std::strerror(errno));
      }
      char chunk[65536];
      const ssize_t n = read(from_child, chunk, sizeof chunk);
      if (n == 0) throw TransportError("scorer closed its output");
      if (n < 0) {
        if (errno == EINTR || errno == EAGAIN) continue;
        throw TransportError(std::string("cannot read from scorer: ") + std::strerror(errno));
      }
      buffer.append(chunk, static_cast<std::size_t>(n));
    }
  }
};

ExecScorer::ExecScorer(std::vector<std::string> argv, TransportOptions options)
    : argv_(std::move(argv)), options_(options) {
  if (argv_.empty()) throw Error("exec scorer needs a program");
  if (options_.max_in_flight == 0) options_.max_in_flight = 1;
  // A scorer that exits early must surface as a write error, not a signal.
  signal(SIGPIPE, SIG_IGN);

  int in_pipe[2];
  int out_pipe[2];
  if (pipe(in_pipe) != 0) throw TransportError("cannot create pipe");
  if (pipe(out_pipe) != 0) {
    close(in_pipe[0]);
    close(in_pipe[1]);
    throw TransportError("cannot create pipe");
  }
  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  posix_spawn_file_actions_adddup2(&actions, in_pipe[0], STDIN_FILENO);
  posix_spawn_file_actions_adddup2(&actions, out_pipe[1], STDOUT_FILENO);
  posix_spawn_file_actions_addclose(&actions, in_pipe[1]);
  posix_spawn_file_actions_addclose(&actions, out_pipe[0]);
  std::vector<char *> args;
  for (auto &arg : argv_) args.push_back(arg.data());
  args.push_back(nullptr);
  pid_t pid = -1;
  const int rc = posix_spawnp(&pid, args[0], &actions, nullptr, args.data(), environ);
  posix_spawn_file_actions_destroy(&actions);
  close(in_pipe[0]);
  close(out_pipe[1]);
  if (rc != 0) {
    close(in_pipe[1]);
    close(out_pipe[0]);
    throw TransportError("cannot start scorer '" + argv_[0] + "': " + std::strerror(rc));
  }
  process_ = std::make_unique<Process>();
  process_->pid = pid;
  process_->to_child = in_pipe[1];
  process_->from_child = out_pipe[0];
  fcntl(process_->to_child, F_SETFD, FD_CLOEXEC);
  fcntl(process_->from_child, F_SETFD, FD_CLOEXEC);
  fcntl(process_->to_child, F_SETFL, fcntl(process_->to_child, F_GETFL) | O_NONBLOCK);

  const auto deadline = Clock::now() + options_.timeout;
  try {
    handshake_ = ParseHandshake(process_->ReadLine(deadline));
  } catch (const ProtocolError &e) {
    throw TransportError(std::string("bad handshake from scorer: ") + e.what());
  }
}

ExecScorer::~ExecScorer() = default;

std::string ExecScorer::endpoint() const {
  std::string s = "exec:";
  for (std::size_t i = 0; i < argv_.size(); ++i) {
    if (i > 0) s += ' ';
    s += argv_[i];
  }
  return s;
}

std::vector<PpplResponse> ExecScorer::ScoreBatch(std::span<const PpplRequest> requests) {
  std::lock_guard<std::mutex> lock(mutex_);
  if (process_->broken) throw TransportError("scorer process is no longer usable");
  ValidateBatch(requests);
  std::vector<std::optional<PpplResponse>> results(requests.size());
  std::unordered_map<std::string, std::size_t> in_flight;
  std::size_t next = 0;
  std::size_t done = 0;
  try {
    while (done < requests.size()) {
      while (next < requests.size() && in_flight.size() < options_.max_in_flight) {
        const auto deadline = Clock::now() + options_.timeout;
        process_->WriteAll(ToJson(requests[next]).dump() + "\n", deadline);
        in_flight.emplace(requests[next].id, next);
        ++next;
      }
      const auto deadline = Clock::now() + options_.timeout;
      PpplResponse response = ParseResponse(process_->ReadLine(deadline));
      const auto it = in_flight.find(response.id);
      if (it == in_flight.end()) {
        throw ProtocolError("response for unknown id '" + response.id + "'");
      }
      results[it->second] = std::move(response);
      in_flight.erase(it);
      ++done;
    }
  } catch (const Error &) {
    process_->broken = true;
    throw;
  }
  std::vector<PpplResponse> out;
  out.reserve(results.size());
  for (auto &r : results) out.push_back(std::move(*r));
  return out;
}

struct HttpScorer::Client {
  explicit Client(const std::string &scheme_host_port) : client(scheme_host_port) {}
  httplib::Client client;
};

HttpScorer::HttpScorer(std::string base_url, TransportOptions options)
    : base_url_(std::move(base_url)), options_(options) {
  constexpr std::string_view kScheme = "http://";
  if (!std::string_view(base_url_).starts_with(kScheme)) {
    throw Error("HTTP endpoint must start with http://");
  }
  const auto slash = base_url_.find('/', kScheme.size());
  const std::string host_port =
      slash == std::string::npos ? base_url_ : base_url_.substr(0, slash);
  path_prefix_ = slash == std::string::npos ? "" : base_url_.substr(slash);
  while (!path_prefix_.empty() && path_prefix_.back() == '/') path_prefix_.pop_back();
  if (options_.max_batch == 0) options_.max_batch = 1;

  client_ = std::make_unique<Client>(host_port);
  if (!client_->client.is_valid()) throw TransportError("invalid HTTP endpoint " + base_url_);
  const auto seconds = std::chrono::duration_cast<std::chrono::seconds>(options_.timeout);
  const auto usec =
      std::chrono::duration_cast<std::chrono::microseconds>(options_.timeout - seconds);
  client_->client.set_connection_timeout(seconds.count(), usec.count());
  client_->client.set_read_timeout(seconds.count(), usec.count());
  client_->client.set_write_timeout(seconds.count(), usec.count());

  auto res = client_->client.Get(path_prefix_ + "/handshake");
  if (!res) {
    throw TransportError("cannot reach scorer at " + base_url_ + ": " +
                         httplib::to_string(res.error()));
  }
  if (res->status != 200) {
    throw TransportError("scorer handshake returned HTTP " + std::to_string(res->status));
  }
  try {
    auto body = res->body;
    while (!body.empty() && (body.back() == '\n' || body.back() == '\r')) body.pop_back();
    handshake_ = ParseHandshake(body);
  } catch (const ProtocolError &e) {
    throw TransportError(std::string("bad handshake from scorer: ") + e.what());
  }
}

HttpScorer::~HttpScorer() = default;

std::vector<PpplResponse> HttpScorer::ScoreBatch(std::span<const PpplRequest> requests) {
  std::lock_guard<std::mutex> lock(mutex_);
  ValidateBatch(requests);
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < requests.size(); ++i) index.emplace(requests[i].id, i);
  std::vector<std::optional<PpplResponse>> results(requests.size());
  for (std::size_t start = 0; start < requests.size(); start += options_.max_batch) {
    const std::size_t stop = std::min(requests.size(), start + options_.max_batch);
    std::string body;
    for (std::size_t i = start; i < stop; ++i) {
      body += ToJson(requests[i]).dump();
      body += '\n';
    }
    auto res = client_->client.Post(path_prefix_ + "/score", body, "application/x-ndjson");
    if (!res) {
      throw TransportError("request to " + base_url_ + " failed: " +
                           httplib::to_string(res.error()));
    }
    if (res->status != 200) {
      throw TransportError("scorer returned HTTP " + std::to_string(res->status));
    }
    std::size_t start_line = 0;
    const std::string &text = res->body;
    while (start_line < text.size()) {
      auto stop_line = text.find('\n', start_line);
      if (stop_line == std::string::npos) stop_line = text.size();
      std::string_view line(text.data() + start_line, stop_line - start_line);
      if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
      start_line = stop_line + 1;
      if (line.empty()) continue;
      PpplResponse response = ParseResponse(line);
      const auto it = index.find(response.id);
      if (it == index.end()) {
        throw ProtocolError("response for unknown id '" + response.id + "'");
      }
      results[it->second] = std::move(response);
    }
  }
  std::vector<PpplResponse> out;
  out.reserve(results.size());
  for (std::size_t i = 0; i < results.size(); ++i) {
    out.push_back(results[i] ? std::move(*results[i])
                             : MakeErrorResponse(requests[i].id, "no response from scorer"));
  }
  return out;
}

}  // namespace htrqe
