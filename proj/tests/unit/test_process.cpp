#include <atomic>
#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <stdexcept>

#include "aprkit/parallel.hpp"
#include "aprkit/process.hpp"
#include "doctest.h"
#include "test_util.hpp"

using namespace aprkit;
using namespace std::chrono_literals;

TEST_CASE("exit status and output capture") {
  auto ok = process::run_shell({.command = "echo out; echo err >&2"});
  CHECK(ok.ok());
  CHECK(ok.output == "out\nerr\n");

  auto bad = process::run_shell({.command = "exit 7"});
  CHECK(bad.exit_code == 7);
  CHECK_FALSE(bad.ok());

  auto killed = process::run_shell({.command = "kill -TERM $$"});
  CHECK(killed.signal == SIGTERM);
  CHECK_FALSE(killed.ok());
}

TEST_CASE("stdin and working directory") {
  testutil::TempDir dir;
  text::write_file(dir / "marker", "");
  auto r = process::run_shell({.command = "cat; ls", .workdir = dir.path().string(), .input = "hello\n"});
  CHECK(r.output == "hello\nmarker\n");
}

TEST_CASE("timeout kills the process group") {
  testutil::TempDir dir;
  auto flag = dir / "late";
  auto start = std::chrono::steady_clock::now();
  auto r = process::run_shell(
      {.command = "(sleep 3; touch " + flag + ") & sleep 30", .timeout = 300ms});
  CHECK(r.timed_out);
  CHECK_FALSE(r.ok());
  CHECK(std::chrono::steady_clock::now() - start < 2s);
  std::this_thread::sleep_for(3500ms);
  CHECK_FALSE(std::filesystem::exists(flag));
}

TEST_CASE("environment filtering") {
  ::setenv("APRKIT_SECRET", "s3cret", 1);
  ::setenv("APRKIT_KEEP", "kept", 1);
  auto r = process::run_shell({.command = "echo \"[$APRKIT_SECRET][$APRKIT_KEEP][$EXTRA]\"",
                               .env_denylist = {"APRKIT_SECRET"},
                               .env_extra = {"EXTRA=x=y"}});
  CHECK(r.output == "[][kept][x=y]\n");
  ::unsetenv("APRKIT_SECRET");
  ::unsetenv("APRKIT_KEEP");
}

TEST_CASE("output limit") {
  auto r = process::run_shell({.command = "head -c 100000 /dev/zero", .output_limit = 1000});
  CHECK(r.ok());
  CHECK(r.output.size() == 1000);
}

TEST_CASE("parallel_for visits every index and propagates errors") {
  std::vector<std::atomic<int>> hits(200);
  parallel_for(hits.size(), 8, [&](std::size_t i) { hits[i]++; });
  for (auto& h : hits) CHECK(h.load() == 1);
  CHECK_THROWS_AS(parallel_for(50, 4,
                               [](std::size_t i) {
                                 if (i == 17) throw std::runtime_error("boom");
                               }),
                  std::runtime_error);
  CHECK(worker_count(3) == 3);
  CHECK(worker_count(0) >= 1);
}
