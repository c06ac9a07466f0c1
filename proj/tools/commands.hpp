#pragma once

#include "config.hpp"

#include <iosfwd>
#include <stdexcept>
#include <string>

namespace optokerr::cli {

enum ExitCode : int {
    kExitOk = 0,
    kExitConfig = 2,
    kExitSolver = 3,
    kExitNotConverged = 4,
};

// A failed library call or an unusable configuration; carries the exit code.
class CommandError : public std::runtime_error {
public:
    CommandError(int exit_code, const std::string& message)
        : std::runtime_error(message), exit_code_(exit_code) {}
    int exit_code() const noexcept { return exit_code_; }

private:
    int exit_code_;
};

// Each command writes its files under cfg.out_dir and a short report to out.
int run_roots(const RunConfig& cfg, std::ostream& out);
int run_spectrum(const RunConfig& cfg, std::ostream& out);
int run_sweep(const RunConfig& cfg, std::ostream& out);
int run_settle(const RunConfig& cfg, std::ostream& out);

} // namespace optokerr::cli
