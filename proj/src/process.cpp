#include "aprkit/process.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <mutex>

extern char** environ;

namespace aprkit::process {
namespace {

class Fd {
 public:
  Fd() = default;
  explicit Fd(int fd) : fd_(fd) {}
  ~Fd() { reset(); }
  Fd(const Fd&) = delete;
  Fd& operator=(const Fd&) = delete;

  int get() const { return fd_; }
  void reset(int fd = -1) {
    if (fd_ >= 0) ::close(fd_);
    fd_ = fd;
  }

 private:
  int fd_ = -1;
};

std::vector<std::string> build_env(const Options& o) {
  std::vector<std::string> env;
  auto name_of = [](std::string_view kv) { return kv.substr(0, kv.find('=')); };
  auto overridden = [&](std::string_view name) {
    return std::any_of(o.env_extra.begin(), o.env_extra.end(),
                       [&](const std::string& kv) { return name_of(kv) == name; });
  };
  for (char** e = environ; e && *e; ++e) {
    std::string_view kv(*e);
    auto name = name_of(kv);
    if (std::find(o.env_denylist.begin(), o.env_denylist.end(), name) != o.env_denylist.end())
      continue;
    if (overridden(name)) continue;
    env.emplace_back(kv);
  }
  env.insert(env.end(), o.env_extra.begin(), o.env_extra.end());
  return env;
}

void set_nonblocking(int fd) { ::fcntl(fd, F_SETFL, ::fcntl(fd, F_GETFL) | O_NONBLOCK); }

}  // namespace

Result run_shell(const Options& o) {
  // A child that exits without reading its input must not kill us.
  static std::once_flag sigpipe_once;
  std::call_once(sigpipe_once, [] { ::signal(SIGPIPE, SIG_IGN); });

  int out_pipe[2];
  int in_pipe[2];
  if (::pipe2(out_pipe, O_CLOEXEC) != 0) throw SpawnError(std::strerror(errno));
  Fd out_r(out_pipe[0]), out_w(out_pipe[1]);
  if (::pipe2(in_pipe, O_CLOEXEC) != 0) throw SpawnError(std::strerror(errno));
  Fd in_r(in_pipe[0]), in_w(in_pipe[1]);

  // Everything the child touches is prepared before fork.
  auto env_strings = build_env(o);
  std::vector<char*> envp;
  for (auto& s : env_strings) envp.push_back(s.data());
  envp.push_back(nullptr);
  const char* workdir = o.workdir.empty() ? nullptr : o.workdir.c_str();

  const auto start = std::chrono::steady_clock::now();
  pid_t pid = ::fork();
  if (pid < 0) throw SpawnError(std::strerror(errno));
  if (pid == 0) {
    ::setpgid(0, 0);
    ::dup2(in_r.get(), STDIN_FILENO);
    ::dup2(out_w.get(), STDOUT_FILENO);
    ::dup2(out_w.get(), STDERR_FILENO);
    if (workdir && ::chdir(workdir) != 0) ::_exit(127);
    ::execle("/bin/sh", "sh", "-c", o.command.c_str(), static_cast<char*>(nullptr),
             envp.data());
    ::_exit(127);
  }
  ::setpgid(pid, pid);
  out_w.reset();
  in_r.reset();
  set_nonblocking(out_r.get());
  set_nonblocking(in_w.get());
  if (o.input.empty()) in_w.reset();

  Result result;
  std::size_t written = 0;
  char buf[8192];
  bool open = true;
  while (open) {
    int wait_ms = -1;
    if (o.timeout.count() > 0) {
      auto left = o.timeout - std::chrono::duration_cast<std::chrono::milliseconds>(
                                  std::chrono::steady_clock::now() - start);
      if (left.count() <= 0) {
        result.timed_out = true;
        ::kill(-pid, SIGKILL);
        break;
      }
      wait_ms = static_cast<int>(left.count());
    }
    pollfd fds[2] = {{out_r.get(), POLLIN, 0}, {in_w.get(), POLLOUT, 0}};
    int nfds = in_w.get() >= 0 ? 2 : 1;
    int rc = ::poll(fds, static_cast<nfds_t>(nfds), wait_ms);
    if (rc < 0) {
      if (errno == EINTR) continue;
      break;
    }
    if (nfds == 2 && (fds[1].revents & (POLLOUT | POLLERR | POLLHUP))) {
      ssize_t n = ::write(in_w.get(), o.input.data() + written, o.input.size() - written);
      if (n > 0) written += static_cast<std::size_t>(n);
      if (n < 0 && errno != EAGAIN) written = o.input.size();
      if (written >= o.input.size()) in_w.reset();
    }
    if (fds[0].revents & (POLLIN | POLLHUP | POLLERR)) {
      ssize_t n = ::read(out_r.get(), buf, sizeof buf);
      if (n > 0) {
        auto room = o.output_limit > result.output.size() ? o.output_limit - result.output.size() : 0;
        result.output.append(buf, std::min(room, static_cast<std::size_t>(n)));
      } else if (n == 0 || errno != EAGAIN) {
        open = false;
      }
    }
  }

  // Output closed; the shell may still be running if it detached its stdout.
  int status = 0;
  while (true) {
    pid_t r = ::waitpid(pid, &status, result.timed_out ? 0 : WNOHANG);
    if (r == pid) break;
    if (r < 0 && errno != EINTR) break;
    if (r == 0) {
      if (o.timeout.count() > 0 && std::chrono::steady_clock::now() - start >= o.timeout) {
        result.timed_out = true;
        ::kill(-pid, SIGKILL);
      } else {
        ::usleep(2000);
      }
    }
  }
  // Leave nothing behind from the group.
  ::kill(-pid, SIGKILL);

  if (WIFEXITED(status)) result.exit_code = WEXITSTATUS(status);
  if (WIFSIGNALED(status)) result.signal = WTERMSIG(status);
  result.elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
      std::chrono::steady_clock::now() - start);
  return result;
}

}  // namespace aprkit::process
