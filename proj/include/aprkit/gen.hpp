#pragma once

// Prompt construction and candidate generation over a small JSON-over-HTTP
// protocol: POST {prompt, n, max_new_tokens, stop} -> {outputs: [...]}.

#include <chrono>
#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "aprkit/error.hpp"
#include "aprkit/repr.hpp"

namespace aprkit::gen {

using repr::Region;
using syntax::SourceFunction;

struct GenerationConfig {
  std::size_t num_candidates = 10;
  std::size_t max_new_tokens = 256;
  std::vector<std::string> stop_tokens = {"</s>", "<EOT>", "<|endoftext|>", "<EOS>"};
  /// http://host:port/path
  std::string backend = "http://127.0.0.1:8080/generate";
  std::chrono::milliseconds timeout{120000};
  int retries = 3;
  std::chrono::milliseconds backoff{250};
  /// Concurrent requests across bugs.
  std::size_t max_in_flight = 4;
};

struct CandidatePatch {
  std::string bug_id;
  std::size_t rank = 0;
  std::string raw_output;
  std::optional<std::string> reconstructed;
  std::optional<std::string> reconstruct_error;
};

class BadTemplate : public Error {
 public:
  using Error::Error;
};

class BackendUnreachable : public Error {
 public:
  using Error::Error;
};

class BackendError : public Error {
 public:
  BackendError(int status, std::string body);
  int status() const { return status_; }
  const std::string& body() const { return body_; }

 private:
  int status_;
  std::string body_;
};

class Timeout : public Error {
 public:
  using Error::Error;
};

/// The IR rendering itself; no instruction text is added.
std::string build_infill_prompt(const SourceFunction& fn, const Region& region,
                                repr::InputKind kind, const repr::Markers& markers = {});

/// Default zero-shot instruction. It is a reconstruction, not a verbatim
/// prompt from any publication. Placeholders: {code} (required) and
/// {fill_token}.
const std::string& default_chat_template();

/// Template with {code} replaced by the IR4 rendering. Throws BadTemplate.
std::string build_chat_prompt(const SourceFunction& fn, const Region& region,
                              const repr::Markers& markers = {},
                              const std::string& tmpl = default_chat_template());

struct GenerationResult {
  std::vector<std::string> outputs;
  std::size_t requested = 0;
  int attempts = 0;

  std::size_t shortfall() const {
    return requested > outputs.size() ? requested - outputs.size() : 0;
  }
};

/// Ranked outputs, truncated to num_candidates. `request_id` is sent as the
/// X-Request-Id header. Retries with exponential backoff, then rethrows the
/// last BackendUnreachable, BackendError or Timeout.
GenerationResult request_candidates(const GenerationConfig& cfg, const std::string& prompt,
                                    const std::string& request_id = {});

/// Reconstructs every output; failures are kept as error tags.
std::vector<CandidatePatch> make_candidates(const std::string& bug_id,
                                            const std::vector<std::string>& outputs,
                                            const SourceFunction& fn, const Region& region,
                                            repr::ReprPair pair,
                                            const repr::Markers& markers = {},
                                            const repr::ReconstructOptions& options = {});

/// Appends {bug_id, rank, raw_output} records.
void append_raw_candidates(const std::string& path, const std::vector<CandidatePatch>& candidates);
std::vector<CandidatePatch> read_raw_candidates(const std::string& path);

/// Loopback server speaking the protocol. Outputs are looked up by the
/// X-Request-Id header, then by exact prompt; unknown keys get an empty list.
class MockBackend {
 public:
  explicit MockBackend(std::map<std::string, std::vector<std::string>> by_id,
                       std::map<std::string, std::vector<std::string>> by_prompt = {});
  ~MockBackend();
  MockBackend(const MockBackend&) = delete;
  MockBackend& operator=(const MockBackend&) = delete;

  std::string endpoint() const;
  std::size_t request_count() const;
  /// Ids of received requests in arrival order.
  std::vector<std::string> request_ids() const;

  /// The next `count` requests fail with `status`.
  void fail_next(int count, int status = 503);
  /// Responses are delayed by this much.
  void set_delay(std::chrono::milliseconds delay);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace aprkit::gen
