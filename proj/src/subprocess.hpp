#pragma once

#include <string>
#include <vector>

namespace scalekit::detail {

struct ProcessResult {
    int exit_code = -1;
    bool timed_out = false;
    bool spawn_failed = false;
};

/// fork/exec the argv (no shell), wait up to timeout_sec, SIGKILL on expiry.
/// The child inherits stdout/stderr.
ProcessResult run_process(const std::vector<std::string>& argv, double timeout_sec);

}  // namespace scalekit::detail
