#include "rlvr/code/sandbox.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/resource.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <fstream>
#include <sstream>

namespace rlvr::code {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

ScratchDir::ScratchDir(const fs::path& parent) {
  std::string pattern = (parent / "rlvr-judge-XXXXXX").string();
  if (!mkdtemp(pattern.data()))
    throw SandboxError("mkdtemp failed: " + std::string(std::strerror(errno)));
  path_ = pattern;
}

ScratchDir::~ScratchDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

fs::path ScratchDir::write(const std::string& name, const std::string& contents) const {
  const fs::path p = path_ / name;
  std::ofstream out(p, std::ios::binary);
  out << contents;
  if (!out) throw SandboxError("cannot write " + p.string());
  return p;
}

std::vector<std::string> expand_runner(const std::string& tmpl, const std::string& file) {
  std::vector<std::string> argv;
  std::istringstream ss(tmpl);
  std::string word;
  bool substituted = false;
  while (ss >> word) {
    if (auto at = word.find("{file}"); at != std::string::npos) {
      word.replace(at, 6, file);
      substituted = true;
    }
    argv.push_back(word);
  }
  if (argv.empty() || !substituted)
    throw SandboxError("runner template '" + tmpl + "' must contain {file}");
  return argv;
}

namespace {

struct Pipe {
  int fd[2] = {-1, -1};
  Pipe() {
    if (pipe2(fd, O_CLOEXEC) != 0) throw SandboxError("pipe failed: " + std::string(std::strerror(errno)));
  }
  ~Pipe() { close_both(); }
  void close_end(int i) {
    if (fd[i] >= 0) ::close(fd[i]);
    fd[i] = -1;
  }
  void close_both() {
    close_end(0);
    close_end(1);
  }
};

void set_nonblocking(int fd) { fcntl(fd, F_SETFL, fcntl(fd, F_GETFL) | O_NONBLOCK); }

/// utime + stime of a live process from /proc, or -1 if unavailable.
long long proc_cpu_ticks(pid_t pid) {
  std::ifstream in("/proc/" + std::to_string(pid) + "/stat");
  std::string content;
  if (!std::getline(in, content)) return -1;
  // The command name may contain spaces; fields resume after the last ')'.
  const auto rp = content.rfind(')');
  if (rp == std::string::npos) return -1;
  std::istringstream ss(content.substr(rp + 2));
  std::string field;
  long long utime = 0, stime = 0;
  for (int i = 3; i <= 15; ++i) {
    if (!(ss >> field)) return -1;
    if (i == 14) utime = std::stoll(field);
    if (i == 15) stime = std::stoll(field);
  }
  return utime + stime;
}

[[noreturn]] void child_exec(const std::vector<std::string>& argv, const SandboxLimits& limits,
                             const fs::path& workdir, int in_fd, int out_fd, int err_fd,
                             int report_fd) {
  auto fail = [&](int code) {
    const int e = errno;
    (void)!write(report_fd, &e, sizeof e);
    _exit(code);
  };
  setpgid(0, 0);
  if (dup2(in_fd, 0) < 0 || dup2(out_fd, 1) < 0 || dup2(err_fd, 2) < 0) fail(126);
  if (chdir(workdir.c_str()) != 0) fail(126);
  rlimit as{limits.address_space_bytes, limits.address_space_bytes};
  setrlimit(RLIMIT_AS, &as);
  rlimit fsz{limits.file_bytes, limits.file_bytes};
  setrlimit(RLIMIT_FSIZE, &fsz);
  rlimit core{0, 0};
  setrlimit(RLIMIT_CORE, &core);
  std::vector<char*> args;
  for (const auto& a : argv) args.push_back(const_cast<char*>(a.c_str()));
  args.push_back(nullptr);
  execvp(args[0], args.data());
  fail(127);
  _exit(127);
}

}  // namespace

ProcessResult run_process(const std::vector<std::string>& argv, const std::string& input,
                          std::chrono::milliseconds time_limit, const SandboxLimits& limits,
                          const fs::path& workdir) {
  if (argv.empty()) throw SandboxError("empty command");
  Pipe in, out, err, report;
  const auto t0 = Clock::now();
  const pid_t pid = fork();
  if (pid < 0) throw SandboxError("fork failed: " + std::string(std::strerror(errno)));
  if (pid == 0) child_exec(argv, limits, workdir, in.fd[0], out.fd[1], err.fd[1], report.fd[1]);
  setpgid(pid, pid);  // also done in the child; whichever runs first wins

  in.close_end(0);
  out.close_end(1);
  err.close_end(1);
  report.close_end(1);

  // Exec succeeded iff the CLOEXEC report pipe closes without data.
  int child_errno = 0;
  const ssize_t got = ::read(report.fd[0], &child_errno, sizeof child_errno);
  if (got == static_cast<ssize_t>(sizeof child_errno)) {
    int status;
    waitpid(pid, &status, 0);
    throw SandboxError("cannot exec '" + argv[0] + "': " + std::strerror(child_errno));
  }

  ProcessResult r;
  set_nonblocking(in.fd[1]);
  set_nonblocking(out.fd[0]);
  set_nonblocking(err.fd[0]);
  std::size_t written = 0;
  if (input.empty()) in.close_end(1);

  const long ticks_per_sec = sysconf(_SC_CLK_TCK);
  const auto cpu_limit_ticks =
      static_cast<long long>(static_cast<double>(time_limit.count()) * ticks_per_sec / 1000.0);
  const auto wall_limit = std::chrono::duration_cast<Clock::duration>(
      std::chrono::duration<double, std::milli>(time_limit.count() * limits.wall_factor));
  bool killed = false;
  char buf[65536];

  int status = 0;
  rusage usage{};
  bool reaped = false;
  while (!reaped) {
    pollfd fds[3];
    int n = 0;
    int idx_out = -1, idx_err = -1, idx_in = -1;
    if (out.fd[0] >= 0) { fds[n] = {out.fd[0], POLLIN, 0}; idx_out = n++; }
    if (err.fd[0] >= 0) { fds[n] = {err.fd[0], POLLIN, 0}; idx_err = n++; }
    if (in.fd[1] >= 0) { fds[n] = {in.fd[1], POLLOUT, 0}; idx_in = n++; }
    poll(n > 0 ? fds : nullptr, static_cast<nfds_t>(n), 10);

    if (idx_in >= 0 && (fds[idx_in].revents & (POLLOUT | POLLERR | POLLHUP))) {
      const ssize_t w = ::write(in.fd[1], input.data() + written, input.size() - written);
      if (w > 0) written += static_cast<std::size_t>(w);
      if (w < 0 && errno != EAGAIN) written = input.size();  // reader went away
      if (written >= input.size()) in.close_end(1);
    }
    auto drain = [&](int idx, Pipe& p, std::string& sink) {
      if (idx < 0 || !(fds[idx].revents & (POLLIN | POLLHUP | POLLERR))) return;
      const ssize_t k = ::read(p.fd[0], buf, sizeof buf);
      if (k > 0) {
        sink.append(buf, static_cast<std::size_t>(k));
      } else if (k == 0 || errno != EAGAIN) {
        p.close_end(0);
      }
    };
    drain(idx_out, out, r.stdout_data);
    drain(idx_err, err, r.stderr_data);

    if (!killed && r.stdout_data.size() + r.stderr_data.size() > limits.output_bytes) {
      r.output_limit = true;
      kill(-pid, SIGKILL);
      killed = true;
    }
    if (!killed) {
      const long long ticks = proc_cpu_ticks(pid);
      if ((ticks >= 0 && ticks > cpu_limit_ticks) || Clock::now() - t0 > wall_limit) {
        r.timed_out = true;
        kill(-pid, SIGKILL);
        killed = true;
      }
    }
    // Reap only once output is fully drained, unless the pipes are held open by a
    // process we already killed.
    if ((out.fd[0] < 0 && err.fd[0] < 0) || killed) {
      const pid_t w = wait4(pid, &status, WNOHANG, &usage);
      if (w == pid) {
        reaped = true;
      } else if (w < 0 && errno != EINTR) {
        throw SandboxError("wait4 failed: " + std::string(std::strerror(errno)));
      }
    }
  }
  // Descendants that kept running after the leader exited.
  kill(-pid, SIGKILL);
  r.wall_time = std::chrono::duration_cast<std::chrono::microseconds>(Clock::now() - t0);
  r.cpu_time = std::chrono::seconds(usage.ru_utime.tv_sec + usage.ru_stime.tv_sec) +
               std::chrono::microseconds(usage.ru_utime.tv_usec + usage.ru_stime.tv_usec);
  if (WIFSIGNALED(status)) {
    r.signaled = true;
    r.signal = WTERMSIG(status);
  } else {
    r.exit_code = WEXITSTATUS(status);
  }
  // A process that finished just past its CPU budget is still over the limit.
  if (!r.timed_out && r.cpu_time > time_limit) r.timed_out = true;
  return r;
}

}  // namespace rlvr::code
