#pragma once

#include <cstdint>
#include <exception>
#include <optional>
#include <string>

namespace eulerfan {

/// Process exit codes shared by every command.
enum ExitCode : int { kExitOk = 0, kExitConstraint = 1, kExitNumerical = 2, kExitBadInput = 3 };

/// Settings common to all commands.  Equal configurations give byte-identical report.json files.
struct RunConfig {
    std::string command;
    std::uint64_t seed = 1;
    std::optional<double> tol;
    int threads = 1;
    std::string out_dir = ".";        ///< EULERFAN_OUT_DIR when set, otherwise the working directory
    std::optional<std::string> json;  ///< extra copy of the report
};

/// Maps a library exception to an exit code (bad input 3, numerical 2, margin or constraint 1).
int exit_code_for(const std::exception& e);

/// Parses and runs one command; returns the exit code.
int run_cli(int argc, char** argv);

}  // namespace eulerfan
