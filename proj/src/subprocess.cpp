#include "subprocess.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <chrono>
#include <cstdio>
#include <cstring>
#include <stdexcept>

#include "polex/errors.hpp"

namespace polex {

namespace {

void close_fd(int& fd) {
    if (fd >= 0) {
        ::close(fd);
        fd = -1;
    }
}

}  // namespace

ProcessResult run_process(const std::vector<std::string>& argv, double timeout_seconds) {
    if (argv.empty()) throw ConfigError("external command is empty");

    int out_pipe[2] = {-1, -1};
    int err_pipe[2] = {-1, -1};
    if (::pipe(out_pipe) != 0 || ::pipe(err_pipe) != 0) {
        throw ExternalSimError("pipe() failed", std::strerror(errno));
    }

    const pid_t pid = ::fork();
    if (pid < 0) {
        throw ExternalSimError("fork() failed", std::strerror(errno));
    }
    if (pid == 0) {
        // Child: wire pipes to stdout/stderr and exec.
        ::dup2(out_pipe[1], STDOUT_FILENO);
        ::dup2(err_pipe[1], STDERR_FILENO);
        ::close(out_pipe[0]);
        ::close(out_pipe[1]);
        ::close(err_pipe[0]);
        ::close(err_pipe[1]);
        std::vector<char*> args;
        args.reserve(argv.size() + 1);
        for (const auto& a : argv) args.push_back(const_cast<char*>(a.c_str()));
        args.push_back(nullptr);
        ::execvp(args[0], args.data());
        ::fprintf(stderr, "exec failed: %s: %s\n", args[0], std::strerror(errno));
        ::_exit(127);
    }

    close_fd(out_pipe[1]);
    close_fd(err_pipe[1]);

    ProcessResult result;
    const auto deadline = std::chrono::steady_clock::now() +
                          std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                              std::chrono::duration<double>(timeout_seconds));

    char buf[4096];
    int open_count = 2;
    while (open_count > 0) {
        struct pollfd fds[2];
        nfds_t nfds = 0;
        int out_slot = -1;
        int err_slot = -1;
        if (out_pipe[0] >= 0) {
            out_slot = static_cast<int>(nfds);
            fds[nfds++] = {out_pipe[0], POLLIN, 0};
        }
        if (err_pipe[0] >= 0) {
            err_slot = static_cast<int>(nfds);
            fds[nfds++] = {err_pipe[0], POLLIN, 0};
        }

        int wait_ms = -1;
        if (timeout_seconds > 0.0) {
            const auto remaining = std::chrono::duration_cast<std::chrono::milliseconds>(
                deadline - std::chrono::steady_clock::now());
            wait_ms = static_cast<int>(std::max<long long>(remaining.count(), 0));
        }

        const int rc = ::poll(fds, nfds, wait_ms);
        if (rc < 0) {
            if (errno == EINTR) continue;
            break;
        }
        if (rc == 0) {
            // Timed out: kill and stop reading.
            result.timed_out = true;
            ::kill(pid, SIGKILL);
            break;
        }
        auto drain = [&](int slot, int& fd, std::string& sink) {
            if (slot < 0 || fd < 0) return;
            if (fds[slot].revents & (POLLIN | POLLHUP | POLLERR)) {
                const ssize_t n = ::read(fd, buf, sizeof buf);
                if (n > 0) {
                    sink.append(buf, static_cast<std::size_t>(n));
                } else {
                    close_fd(fd);
                    --open_count;
                }
            }
        };
        drain(out_slot, out_pipe[0], result.out);
        drain(err_slot, err_pipe[0], result.err);
    }
    close_fd(out_pipe[0]);
    close_fd(err_pipe[0]);

    int status = 0;
    ::waitpid(pid, &status, 0);
    if (result.timed_out) {
        result.exit_code = -1;
    } else if (WIFEXITED(status)) {
        result.exit_code = WEXITSTATUS(status);
    } else if (WIFSIGNALED(status)) {
        result.exit_code = 128 + WTERMSIG(status);
    }
    return result;
}

}  // namespace polex
