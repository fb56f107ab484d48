// Subprocess execution for external engines (POSIX).

#include <fcntl.h>
#include <poll.h>
#include <sys/resource.h>
#include <sys/stat.h>
#include <sys/time.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <chrono>
#include <cmath>
#include <csignal>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

#include "measp/engines.hpp"
#include "measp/error.hpp"
#include "temp_dir.hpp"

namespace measp {

namespace {

namespace fs = std::filesystem;
using detail::read_file;
using detail::TempDir;
using Clock = std::chrono::steady_clock;

double seconds(const timeval& tv) { return static_cast<double>(tv.tv_sec) + static_cast<double>(tv.tv_usec) / 1e6; }

std::optional<std::string> resolve_executable(const std::string& name) {
    auto executable = [](const fs::path& p) {
        struct stat st {};
        return ::stat(p.c_str(), &st) == 0 && S_ISREG(st.st_mode) && ::access(p.c_str(), X_OK) == 0;
    };
    if (name.find('/') != std::string::npos) {
        if (executable(name)) return name;
        return std::nullopt;
    }
    const char* path = std::getenv("PATH");
    std::istringstream dirs(path ? path : "/usr/bin:/bin");
    std::string dir;
    while (std::getline(dirs, dir, ':')) {
        fs::path candidate = fs::path(dir.empty() ? "." : dir) / name;
        if (executable(candidate)) return candidate.string();
    }
    return std::nullopt;
}

std::string substitute(std::string arg, const std::map<std::string, std::string>& values) {
    for (const auto& [key, value] : values) {
        std::size_t pos = 0;
        while ((pos = arg.find(key, pos)) != std::string::npos) {
            arg.replace(pos, key.size(), value);
            pos += value.size();
        }
    }
    return arg;
}

class Fd {
public:
    explicit Fd(int fd = -1) : fd_(fd) {}
    ~Fd() { reset(); }
    Fd(const Fd&) = delete;
    Fd& operator=(const Fd&) = delete;
    Fd(Fd&& o) noexcept : fd_(std::exchange(o.fd_, -1)) {}

    int get() const { return fd_; }
    void reset() {
        if (fd_ >= 0) ::close(fd_);
        fd_ = -1;
    }

private:
    int fd_;
};

}  // namespace

void check_limit_support(const Limits& limits) {
    if (!(limits.cpu_seconds > 0) || !std::isfinite(limits.cpu_seconds)) {
        throw ConfigError("CPU time limit must be a positive number of seconds");
    }
    if (limits.memory_bytes == 0) throw ConfigError("memory limit must be positive");
    rlimit cpu{}, as{};
    if (::getrlimit(RLIMIT_CPU, &cpu) != 0 || ::getrlimit(RLIMIT_AS, &as) != 0) {
        throw ConfigError("resource limits are not available on this platform");
    }
    const auto cpu_needed = static_cast<rlim_t>(std::ceil(limits.cpu_seconds)) + 1;
    if (cpu.rlim_max != RLIM_INFINITY && cpu.rlim_max < cpu_needed) {
        throw ConfigError("hard CPU limit of this process is below the requested limit");
    }
    if (as.rlim_max != RLIM_INFINITY && as.rlim_max < limits.memory_bytes) {
        throw ConfigError("hard address-space limit of this process is below the requested limit");
    }
}

EngineRun run_engine(const EngineSpec& spec, const fs::path& input, const Limits& limits, const RunOptions& options) {
    check_limit_support(limits);

    EngineRun run;
    run.record.engine_name = spec.name;
    run.record.instance_id = options.instance_id.empty() ? input.stem().string() : options.instance_id;

    if (spec.simulated) {
        const auto it = spec.simulated->find(run.record.instance_id);
        if (it == spec.simulated->end()) {
            run.record.status = RunStatus::Error;
            run.diagnostics = "mock engine '" + spec.name + "' has no entry for instance '" + run.record.instance_id + "'";
            return run;
        }
        MockEntry entry = it->second;
        if (entry.status == RunStatus::Timeout || (is_solved(entry.status) && entry.cpu_seconds >= limits.cpu_seconds)) {
            entry.status = RunStatus::Timeout;
            entry.cpu_seconds = std::max(entry.cpu_seconds, limits.cpu_seconds);
        }
        run.record.status = entry.status;
        run.record.cpu_seconds = entry.cpu_seconds;
        run.record.wall_seconds = entry.cpu_seconds;
        if (is_solved(entry.status)) {
            try {
                if (options.mode == EngineMode::Ground) {
                    if (!fs::is_regular_file(input)) throw Error("cannot read " + input.string());
                    run.output = mock_ground_output(read_file(input), spec.produces(EngineMode::Ground));
                } else {
                    run.output = mock_solver_output(entry.status);
                }
            } catch (const std::exception& e) {
                run.record.status = RunStatus::Error;
                run.diagnostics = e.what();
                return run;
            }
        }
        if (options.mode == EngineMode::Solve && run.record.status == RunStatus::SolvedSat) {
            if (auto atoms = first_answer_set(run.output)) run.record.answer_digest = answer_digest(*atoms);
        }
        return run;
    }

    if (spec.command.empty()) {
        run.diagnostics = "engine '" + spec.name + "' has an empty command";
        return run;
    }

    std::optional<TempDir> scratch;
    fs::path output_path;
    const bool file_output = std::any_of(spec.command.begin(), spec.command.end(),
                                         [](const std::string& a) { return a.find("{output}") != std::string::npos; });
    if (file_output) {
        scratch.emplace();
        output_path = scratch->path() / "output";
    }
    const std::map<std::string, std::string> values = {
        {"{input}", input.string()},
        {"{output}", output_path.string()},
        {"{instance}", run.record.instance_id},
        {"{mode}", std::string(to_string(options.mode))},
    };
    std::vector<std::string> argv;
    for (const auto& a : spec.command) argv.push_back(substitute(a, values));

    const auto exe = resolve_executable(argv.front());
    if (!exe) {
        run.diagnostics = "executable not found: " + argv.front();
        return run;
    }

    std::vector<char*> cargv;
    for (auto& a : argv) cargv.push_back(a.data());
    cargv.push_back(nullptr);

    int out_pipe[2], err_pipe[2];
    if (::pipe2(out_pipe, O_CLOEXEC) != 0) throw Error("pipe failed: " + std::string(std::strerror(errno)));
    Fd out_read(out_pipe[0]), out_write(out_pipe[1]);
    if (::pipe2(err_pipe, O_CLOEXEC) != 0) throw Error("pipe failed: " + std::string(std::strerror(errno)));
    Fd err_read(err_pipe[0]), err_write(err_pipe[1]);
    Fd dev_null(::open("/dev/null", O_RDONLY | O_CLOEXEC));

    const rlim_t cpu_soft = static_cast<rlim_t>(std::ceil(limits.cpu_seconds));
    const rlimit cpu_limit{cpu_soft, cpu_soft + 1};
    const rlimit as_limit{static_cast<rlim_t>(limits.memory_bytes), static_cast<rlim_t>(limits.memory_bytes)};
    const rlimit no_core{0, 0};
    const char* exe_path = exe->c_str();

    const auto started = Clock::now();
    const pid_t pid = ::fork();
    if (pid < 0) throw Error("fork failed: " + std::string(std::strerror(errno)));
    if (pid == 0) {
        ::setpgid(0, 0);
        ::setrlimit(RLIMIT_CPU, &cpu_limit);
        ::setrlimit(RLIMIT_AS, &as_limit);
        ::setrlimit(RLIMIT_CORE, &no_core);
        if (dev_null.get() >= 0) ::dup2(dev_null.get(), STDIN_FILENO);
        ::dup2(out_write.get(), STDOUT_FILENO);
        ::dup2(err_write.get(), STDERR_FILENO);
        ::execv(exe_path, cargv.data());
        _exit(127);
    }
    ::setpgid(pid, pid);
    out_write.reset();
    err_write.reset();

    const auto deadline = started + std::chrono::duration_cast<Clock::duration>(
                                        std::chrono::duration<double>(2 * limits.cpu_seconds));
    std::string out_text, err_text;
    bool out_open = true, err_open = true;
    bool watchdog = false;
    int status = 0;
    rusage usage{};
    bool reaped = false;
    char buf[65536];

    while (!reaped) {
        pollfd fds[2];
        nfds_t n = 0;
        if (out_open) fds[n++] = {out_read.get(), POLLIN, 0};
        if (err_open) fds[n++] = {err_read.get(), POLLIN, 0};
        if (n > 0) {
            ::poll(fds, n, 20);
            for (nfds_t i = 0; i < n; ++i) {
                if ((fds[i].revents & (POLLIN | POLLHUP | POLLERR)) == 0) continue;
                const bool is_out = fds[i].fd == out_read.get();
                const ssize_t got = ::read(fds[i].fd, buf, sizeof buf);
                if (got > 0) {
                    (is_out ? out_text : err_text).append(buf, static_cast<std::size_t>(got));
                } else if (got == 0 || (errno != EINTR && errno != EAGAIN)) {
                    (is_out ? out_open : err_open) = false;
                }
            }
        } else {
            ::usleep(10000);
        }

        const pid_t r = ::wait4(pid, &status, WNOHANG, &usage);
        if (r == pid) {
            reaped = true;
        } else if (!watchdog && Clock::now() >= deadline) {
            watchdog = true;
            ::kill(-pid, SIGKILL);
            ::kill(pid, SIGKILL);
        }
    }
    // Descendants may still hold the pipes; take what is already buffered and stop them.
    ::kill(-pid, SIGKILL);
    for (Fd* fd : {&out_read, &err_read}) {
        const bool is_out = fd == &out_read;
        if (!(is_out ? out_open : err_open)) continue;
        ::fcntl(fd->get(), F_SETFL, O_NONBLOCK);
        ssize_t got;
        while ((got = ::read(fd->get(), buf, sizeof buf)) > 0) (is_out ? out_text : err_text).append(buf, static_cast<std::size_t>(got));
    }

    ProcessOutcome outcome;
    outcome.exited = WIFEXITED(status);
    outcome.exit_code = outcome.exited ? WEXITSTATUS(status) : 0;
    outcome.signal = WIFSIGNALED(status) ? WTERMSIG(status) : 0;
    outcome.killed_by_watchdog = watchdog;
    outcome.cpu_seconds = seconds(usage.ru_utime) + seconds(usage.ru_stime);
    outcome.max_rss_bytes = static_cast<std::uint64_t>(usage.ru_maxrss) * 1024;

    run.record.wall_seconds = std::chrono::duration<double>(Clock::now() - started).count();
    run.record.cpu_seconds = outcome.cpu_seconds;
    run.output = file_output ? (fs::exists(output_path) ? read_file(output_path) : std::string()) : std::move(out_text);
    if (file_output && !out_text.empty()) err_text += out_text;
    run.diagnostics = std::move(err_text);
    if (outcome.exited && outcome.exit_code == 127 && run.output.empty()) {
        run.diagnostics += "\nfailed to execute " + argv.front();
    }
    if (watchdog) run.diagnostics += "\nkilled after exceeding the wall-clock guard";

    run.record.status = classify_run(outcome, run.output, run.diagnostics, limits, options.mode);
    if (run.record.status == RunStatus::Timeout) {
        run.record.cpu_seconds = std::max(run.record.cpu_seconds, limits.cpu_seconds);
    }
    if (options.mode == EngineMode::Solve && run.record.status == RunStatus::SolvedSat) {
        if (auto atoms = first_answer_set(run.output)) run.record.answer_digest = answer_digest(*atoms);
    }
    return run;
}

}  // namespace measp
