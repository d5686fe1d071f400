#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <fstream>
#include <string>
#include <thread>
#include <vector>

#include "aprkit/gen.hpp"
#include "aprkit/text.hpp"
#include "doctest.h"
#include "httplib.h"
#include "json.hpp"
#include "test_util.hpp"

using namespace aprkit;
using namespace aprkit::gen;
using repr::InputKind;
using repr::OutputKind;
using syntax::function_from_text;

namespace {

GenerationConfig config_for(const MockBackend& mock) {
  GenerationConfig cfg;
  cfg.backend = mock.endpoint();
  cfg.timeout = std::chrono::seconds(5);
  cfg.backoff = std::chrono::milliseconds(1);
  return cfg;
}

using Outputs = std::map<std::string, std::vector<std::string>>;

// A port nothing listens on.
int closed_port() {
  int fd = ::socket(AF_INET, SOCK_STREAM, 0);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  ::bind(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr);
  socklen_t len = sizeof addr;
  ::getsockname(fd, reinterpret_cast<sockaddr*>(&addr), &len);
  ::close(fd);
  return ntohs(addr.sin_port);
}

std::size_t count(std::string_view hay, std::string_view needle) {
  std::size_t n = 0;
  for (auto p = hay.find(needle); p != std::string_view::npos; p = hay.find(needle, p + 1)) ++n;
  return n;
}

}  // namespace

TEST_CASE("infill prompts are the bare representation") {
  auto fn = function_from_text("int f(int x) {\n  return x + 1;\n}");
  repr::Region r{2, 2};
  for (auto k : {InputKind::IR1, InputKind::IR2, InputKind::IR3, InputKind::IR4})
    CHECK(build_infill_prompt(fn, r, k) == repr::build_input(fn, r, k));
  CHECK(build_infill_prompt(fn, r, InputKind::IR1) == fn.text);
  CHECK(count(build_infill_prompt(fn, r, InputKind::IR3), "<FILL_ME>") == 1);
  CHECK_THROWS_AS(build_infill_prompt(fn, {3, 9}, InputKind::IR3), repr::InvalidRegion);
}

TEST_CASE("chat prompts") {
  auto fn = function_from_text("int one() { return 2; }");
  repr::Region r{1, 1};
  CHECK(build_chat_prompt(fn, r, {}, "Fix: {code}") ==
        "Fix: // buggy code\n// int one() { return 2; }\n<FILL_ME>");
  auto def = build_chat_prompt(fn, r);
  CHECK(def.find("Generate the fixed code chunk to replace the <FILL_ME> token") != std::string::npos);
  CHECK(def.find(repr::build_input(fn, r, InputKind::IR4)) != std::string::npos);
  CHECK_THROWS_AS(build_chat_prompt(fn, r, {}, "Fix this bug."), BadTemplate);
}

TEST_CASE("IR3/IR4 prompts never contain stop tokens") {
  GenerationConfig cfg;
  std::ifstream in(testutil::fixture_path("triples/triples.jsonl"));
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    auto j = nlohmann::json::parse(line);
    auto fn = function_from_text(j["buggy"]);
    repr::Region r{j["region"][0], j["region"][1]};
    for (auto k : {InputKind::IR3, InputKind::IR4}) {
      auto p = build_infill_prompt(fn, r, k);
      for (const auto& s : cfg.stop_tokens) CHECK(p.find(s) == std::string::npos);
    }
    ++n;
  }
  CHECK(n >= 50);
}

TEST_CASE("mock backend contract") {
  MockBackend mock({{"b1", {"x"}}, {"b2", {"a", "b", "c", "d"}}, {"ref", {"return 1;", "junk"}}});
  auto cfg = config_for(mock);

  CHECK(request_candidates(cfg, "p", "b1").outputs == std::vector<std::string>{"x"});
  CHECK(request_candidates(cfg, "p", "unknown").outputs.empty());
  cfg.num_candidates = 2;
  CHECK(request_candidates(cfg, "p", "b2").outputs == std::vector<std::string>{"a", "b"});
  cfg.num_candidates = 10;
  auto r = request_candidates(cfg, "p", "ref");
  CHECK(r.outputs[0] == "return 1;");

  auto four = request_candidates(cfg, "p", "b2");
  CHECK(four.outputs.size() == 4);
  CHECK(four.requested == 10);
  CHECK(four.shortfall() == 6);
  CHECK(mock.request_ids() == std::vector<std::string>{"b1", "unknown", "b2", "ref", "b2"});
}

TEST_CASE("mock backend falls back to prompt lookup") {
  MockBackend mock({}, {{"the prompt", {"p1", "p2"}}});
  auto cfg = config_for(mock);
  CHECK(request_candidates(cfg, "the prompt").outputs == std::vector<std::string>{"p1", "p2"});
  CHECK(request_candidates(cfg, "other").outputs.empty());
}

TEST_CASE("wire protocol field names") {
  httplib::Server server;
  nlohmann::json seen;
  std::string request_id;
  server.Post("/v1/complete", [&](const httplib::Request& req, httplib::Response& res) {
    seen = nlohmann::json::parse(req.body);
    request_id = req.get_header_value("X-Request-Id");
    res.set_content(R"({"outputs":["one","two"]})", "application/json");
  });
  int port = server.bind_to_any_port("127.0.0.1");
  std::thread t([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  GenerationConfig cfg;
  cfg.backend = "http://127.0.0.1:" + std::to_string(port) + "/v1/complete";
  cfg.num_candidates = 3;
  cfg.max_new_tokens = 64;
  cfg.stop_tokens = {"</s>"};
  auto r = request_candidates(cfg, "int f() {\n  <FILL_ME>\n}", "Chart-5");
  server.stop();
  t.join();

  CHECK(r.outputs == std::vector<std::string>{"one", "two"});
  CHECK(seen == nlohmann::json::parse(
                    R"({"prompt":"int f() {\n  <FILL_ME>\n}","n":3,"max_new_tokens":64,"stop":["</s>"]})"));
  CHECK(request_id == "Chart-5");
}

TEST_CASE("backend failures") {
  SUBCASE("unreachable endpoint after retries") {
    GenerationConfig cfg;
    cfg.backend = "http://127.0.0.1:" + std::to_string(closed_port()) + "/generate";
    cfg.retries = 2;
    cfg.timeout = std::chrono::seconds(2);
    cfg.backoff = std::chrono::milliseconds(1);
    CHECK_THROWS_AS(request_candidates(cfg, "p"), BackendUnreachable);
    cfg.backend = "not a url";
    CHECK_THROWS_AS(request_candidates(cfg, "p"), BackendUnreachable);
  }
  SUBCASE("transient errors are retried") {
    MockBackend mock(Outputs{{"b", {"ok"}}});
    auto cfg = config_for(mock);
    mock.fail_next(2);
    auto r = request_candidates(cfg, "p", "b");
    CHECK(r.outputs == std::vector<std::string>{"ok"});
    CHECK(r.attempts == 3);
    CHECK(mock.request_count() == 3);
  }
  SUBCASE("persistent errors surface with status and body") {
    MockBackend mock(Outputs{{"b", {"ok"}}});
    auto cfg = config_for(mock);
    cfg.retries = 1;
    mock.fail_next(5, 500);
    try {
      request_candidates(cfg, "p", "b");
      FAIL("expected BackendError");
    } catch (const BackendError& e) {
      CHECK(e.status() == 500);
      CHECK(e.body() == "injected failure");
    }
    CHECK(mock.request_count() == 2);
  }
  SUBCASE("slow backend times out") {
    MockBackend mock(Outputs{{"b", {"ok"}}});
    auto cfg = config_for(mock);
    cfg.retries = 0;
    cfg.timeout = std::chrono::milliseconds(200);
    mock.set_delay(std::chrono::milliseconds(1500));
    CHECK_THROWS_AS(request_candidates(cfg, "p", "b"), Timeout);
  }
}

TEST_CASE("candidates keep backend rank and one reconstruction outcome") {
  auto buggy = function_from_text("int f(int x) {\n  return x - 1;\n}");
  auto fixed = function_from_text("int f(int x) {\n  return x + 1;\n}");
  repr::Region r{2, 2};
  std::vector<std::string> outputs = {"return x + 1;", "@@ garbage", "return x;"};
  auto c = make_candidates("B-1", outputs, buggy, r, {InputKind::IR4, OutputKind::OR2});
  REQUIRE(c.size() == 3);
  for (std::size_t i = 0; i < c.size(); ++i) {
    CHECK(c[i].rank == i);
    CHECK(c[i].raw_output == outputs[i]);
    CHECK(c[i].reconstructed.has_value() != c[i].reconstruct_error.has_value());
  }
  CHECK(*c[0].reconstructed == fixed.text);

  auto d = make_candidates("B-1", {"not a diff", ""}, buggy, r, {InputKind::IR1, OutputKind::OR3});
  CHECK(d[0].reconstruct_error == "malformed-output");
  CHECK(d[1].reconstructed == buggy.text);

  testutil::TempDir dir;
  append_raw_candidates(dir / "raw.jsonl", c);
  append_raw_candidates(dir / "raw.jsonl", d);
  auto back = read_raw_candidates(dir / "raw.jsonl");
  REQUIRE(back.size() == 5);
  CHECK(back[1].raw_output == "@@ garbage");
  CHECK(back[1].rank == 1);
  CHECK(back[3].bug_id == "B-1");
  CHECK(back[3].rank == 0);
  CHECK(text::split_lines(text::read_file(dir / "raw.jsonl"))[0] ==
        R"({"bug_id":"B-1","rank":0,"raw_output":"return x + 1;"})");
}
