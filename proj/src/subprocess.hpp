#ifndef POLEX_SUBPROCESS_HPP
#define POLEX_SUBPROCESS_HPP

#include <string>
#include <vector>

namespace polex {

struct ProcessResult {
    int exit_code = -1;
    bool timed_out = false;
    std::string out;
    std::string err;
};

/// Runs argv (no shell) capturing stdout and stderr. If the process is still
/// alive after timeout_seconds it is killed and timed_out is set.
/// timeout_seconds <= 0 means no timeout.
ProcessResult run_process(const std::vector<std::string>& argv, double timeout_seconds);

}  // namespace polex

#endif  // POLEX_SUBPROCESS_HPP
