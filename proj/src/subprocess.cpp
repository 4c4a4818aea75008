#include "subprocess.hpp"

#include <cerrno>
#include <chrono>
#include <csignal>
#include <thread>

#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

namespace scalekit::detail {

ProcessResult run_process(const std::vector<std::string>& argv, double timeout_sec) {
    ProcessResult result;
    if (argv.empty()) {
        result.spawn_failed = true;
        return result;
    }

    std::vector<char*> c_argv;
    for (const auto& a : argv) c_argv.push_back(const_cast<char*>(a.c_str()));
    c_argv.push_back(nullptr);

    const pid_t pid = fork();
    if (pid < 0) {
        result.spawn_failed = true;
        return result;
    }
    if (pid == 0) {
        execvp(c_argv[0], c_argv.data());
        _exit(127);
    }

    const auto deadline =
        std::chrono::steady_clock::now() + std::chrono::duration<double>(timeout_sec);
    for (;;) {
        int status = 0;
        const pid_t done = waitpid(pid, &status, WNOHANG);
        if (done == pid) {
            if (WIFEXITED(status))
                result.exit_code = WEXITSTATUS(status);
            else if (WIFSIGNALED(status))
                result.exit_code = 128 + WTERMSIG(status);
            return result;
        }
        if (done < 0 && errno != EINTR) {
            result.spawn_failed = true;
            return result;
        }
        if (std::chrono::steady_clock::now() >= deadline) {
            kill(pid, SIGKILL);
            waitpid(pid, &status, 0);
            result.timed_out = true;
            return result;
        }
        std::this_thread::sleep_for(std::chrono::milliseconds(2));
    }
}

}  // namespace scalekit::detail
