#include "aprkit/gen.hpp"

#include <atomic>
#include <fstream>
#include <mutex>
#include <regex>
#include <thread>

#include "aprkit/diff.hpp"
#include "aprkit/text.hpp"
#include "httplib.h"
#include "json.hpp"

namespace aprkit::gen {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

struct Endpoint {
  std::string origin;
  std::string path;
};

Endpoint parse_endpoint(const std::string& url) {
  static const std::regex re(R"(^(https?://[^/]+)(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(url, m, re))
    throw BackendUnreachable("invalid backend endpoint '" + url + "'");
  return {m[1].str(), m[2].matched ? m[2].str() : "/"};
}

void replace_all(std::string& s, std::string_view from, std::string_view to) {
  for (auto pos = s.find(from); pos != std::string::npos; pos = s.find(from, pos + to.size()))
    s.replace(pos, from.size(), to);
}

GenerationResult request_once(const GenerationConfig& cfg, const Endpoint& ep,
                              const std::string& prompt, const std::string& request_id) {
  httplib::Client client(ep.origin);
  auto secs = std::chrono::duration_cast<std::chrono::seconds>(cfg.timeout);
  auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(cfg.timeout - secs);
  client.set_connection_timeout(secs.count(), usecs.count());
  client.set_read_timeout(secs.count(), usecs.count());
  client.set_write_timeout(secs.count(), usecs.count());

  ordered_json body;
  body["prompt"] = prompt;
  body["n"] = cfg.num_candidates;
  body["max_new_tokens"] = cfg.max_new_tokens;
  body["stop"] = cfg.stop_tokens;
  httplib::Headers headers;
  if (!request_id.empty()) headers.emplace("X-Request-Id", request_id);

  auto start = std::chrono::steady_clock::now();
  auto res = client.Post(ep.path, headers, body.dump(), "application/json");
  if (!res) {
    auto err = res.error();
    auto elapsed = std::chrono::steady_clock::now() - start;
    if (err == httplib::Error::ConnectionTimeout ||
        (err == httplib::Error::Read && elapsed >= cfg.timeout * 9 / 10))
      throw Timeout("backend did not answer within " + std::to_string(cfg.timeout.count()) +
                    " ms");
    throw BackendUnreachable("backend " + ep.origin + " unreachable: " + httplib::to_string(err));
  }
  if (res->status != 200) throw BackendError(res->status, res->body);

  GenerationResult out;
  out.requested = cfg.num_candidates;
  try {
    auto j = json::parse(res->body);
    for (const auto& o : j.at("outputs")) {
      if (out.outputs.size() >= cfg.num_candidates) break;
      out.outputs.push_back(o.get<std::string>());
    }
  } catch (const json::exception& e) {
    throw BackendError(res->status, "malformed response: " + std::string(e.what()));
  }
  return out;
}

}  // namespace

BackendError::BackendError(int status, std::string body)
    : Error("backend returned HTTP " + std::to_string(status) +
            (body.empty() ? "" : ": " + body.substr(0, 200))),
      status_(status),
      body_(std::move(body)) {}

std::string build_infill_prompt(const SourceFunction& fn, const Region& region,
                                repr::InputKind kind, const repr::Markers& markers) {
  return repr::build_input(fn, region, kind, markers);
}

const std::string& default_chat_template() {
  static const std::string t =
      "The following Java function contains a bug. The suspicious lines are shown as "
      "comments below the line \"// buggy code\", and the place where the fix belongs is "
      "marked with the {fill_token} token.\n"
      "Generate the fixed code chunk to replace the {fill_token} token. Reply with the code "
      "chunk only.\n"
      "\n"
      "```java\n"
      "{code}\n"
      "```\n";
  return t;
}

std::string build_chat_prompt(const SourceFunction& fn, const Region& region,
                              const repr::Markers& markers, const std::string& tmpl) {
  if (tmpl.find("{code}") == std::string::npos)
    throw BadTemplate("chat template has no {code} placeholder");
  auto code = repr::build_input(fn, region, repr::InputKind::IR4, markers);
  std::string out = tmpl;
  replace_all(out, "{fill_token}", markers.fill_token);
  replace_all(out, "{code}", code);
  return out;
}

GenerationResult request_candidates(const GenerationConfig& cfg, const std::string& prompt,
                                    const std::string& request_id) {
  if (cfg.num_candidates < 1) throw Error("num_candidates must be at least 1");
  auto ep = parse_endpoint(cfg.backend);
  auto delay = cfg.backoff;
  for (int attempt = 0;; ++attempt) {
    try {
      auto r = request_once(cfg, ep, prompt, request_id);
      r.attempts = attempt + 1;
      return r;
    } catch (const Error&) {
      if (attempt >= cfg.retries) throw;
    }
    std::this_thread::sleep_for(delay);
    delay *= 2;
  }
}

std::vector<CandidatePatch> make_candidates(const std::string& bug_id,
                                            const std::vector<std::string>& outputs,
                                            const SourceFunction& fn, const Region& region,
                                            repr::ReprPair pair, const repr::Markers& markers,
                                            const repr::ReconstructOptions& options) {
  std::vector<CandidatePatch> out;
  for (std::size_t i = 0; i < outputs.size(); ++i) {
    CandidatePatch c{bug_id, i, outputs[i], std::nullopt, std::nullopt};
    try {
      c.reconstructed = repr::reconstruct(fn, region, pair, outputs[i], markers, options);
    } catch (const repr::MalformedOutput&) {
      c.reconstruct_error = "malformed-output";
    } catch (const diff::HunkApplyFailure&) {
      c.reconstruct_error = "hunk-apply-failure";
    } catch (const repr::InvalidRegion&) {
      c.reconstruct_error = "invalid-region";
    } catch (const Error&) {
      c.reconstruct_error = "reconstruct-error";
    }
    out.push_back(std::move(c));
  }
  return out;
}

void append_raw_candidates(const std::string& path, const std::vector<CandidatePatch>& cands) {
  std::ofstream out(path, std::ios::app | std::ios::binary);
  if (!out) throw Error("cannot open " + path);
  for (const auto& c : cands) {
    ordered_json j;
    j["bug_id"] = c.bug_id;
    j["rank"] = c.rank;
    j["raw_output"] = c.raw_output;
    out << j.dump(-1, ' ', false, json::error_handler_t::replace) << '\n';
  }
  if (!out) throw Error("write failed: " + path);
}

std::vector<CandidatePatch> read_raw_candidates(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  std::vector<CandidatePatch> out;
  std::string line;
  while (std::getline(in, line)) {
    if (text::trim(line).empty()) continue;
    auto j = json::parse(line);
    out.push_back({j.at("bug_id"), j.at("rank").get<std::size_t>(), j.at("raw_output"),
                   std::nullopt, std::nullopt});
  }
  return out;
}

struct MockBackend::Impl {
  std::map<std::string, std::vector<std::string>> by_id;
  std::map<std::string, std::vector<std::string>> by_prompt;
  httplib::Server server;
  std::thread thread;
  int port = 0;
  mutable std::mutex mutex;
  std::vector<std::string> ids;
  int failures = 0;
  int failure_status = 503;
  std::chrono::milliseconds delay{0};
};

MockBackend::MockBackend(std::map<std::string, std::vector<std::string>> by_id,
                         std::map<std::string, std::vector<std::string>> by_prompt)
    : impl_(std::make_unique<Impl>()) {
  impl_->by_id = std::move(by_id);
  impl_->by_prompt = std::move(by_prompt);
  auto* impl = impl_.get();
  impl->server.Post(".*", [impl](const httplib::Request& req, httplib::Response& res) {
    std::chrono::milliseconds delay;
    {
      std::lock_guard lock(impl->mutex);
      impl->ids.push_back(req.get_header_value("X-Request-Id"));
      delay = impl->delay;
      if (impl->failures > 0) {
        --impl->failures;
        res.status = impl->failure_status;
        res.set_content("injected failure", "text/plain");
        return;
      }
    }
    if (delay.count() > 0) std::this_thread::sleep_for(delay);
    json request;
    try {
      request = json::parse(req.body);
    } catch (const json::exception&) {
      res.status = 400;
      res.set_content("invalid JSON", "text/plain");
      return;
    }
    std::vector<std::string> outputs;
    auto id = req.get_header_value("X-Request-Id");
    if (auto it = impl->by_id.find(id); it != impl->by_id.end()) {
      outputs = it->second;
    } else if (auto pt = impl->by_prompt.find(request.value("prompt", std::string()));
               pt != impl->by_prompt.end()) {
      outputs = pt->second;
    }
    auto n = request.value("n", static_cast<std::size_t>(outputs.size()));
    if (outputs.size() > n) outputs.resize(n);
    ordered_json body;
    body["outputs"] = outputs;
    res.set_content(body.dump(), "application/json");
  });
  impl->port = impl->server.bind_to_any_port("127.0.0.1");
  if (impl->port <= 0) throw Error("mock backend could not bind a port");
  impl->thread = std::thread([impl] { impl->server.listen_after_bind(); });
  impl->server.wait_until_ready();
}

MockBackend::~MockBackend() {
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

std::string MockBackend::endpoint() const {
  return "http://127.0.0.1:" + std::to_string(impl_->port) + "/generate";
}

std::size_t MockBackend::request_count() const {
  std::lock_guard lock(impl_->mutex);
  return impl_->ids.size();
}

std::vector<std::string> MockBackend::request_ids() const {
  std::lock_guard lock(impl_->mutex);
  return impl_->ids;
}

void MockBackend::fail_next(int count, int status) {
  std::lock_guard lock(impl_->mutex);
  impl_->failures = count;
  impl_->failure_status = status;
}

void MockBackend::set_delay(std::chrono::milliseconds delay) {
  std::lock_guard lock(impl_->mutex);
  impl_->delay = delay;
}

}  // namespace aprkit::gen
