#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "effham/cellsolve.hpp"

namespace effham::cli {

inline constexpr const char* kVersion = "1.0.0";

/// Exit statuses of `run`.
enum ExitCode : int {
    kOk = 0,
    kCheckFailed = 1,
    kConfigError = 2,
    kSolverError = 3,
    kIoError = 4,
};

/// Runs one subcommand. `args` excludes the program name. The one-line
/// summary goes to `out`; failures print an error JSON object to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Maps a library error code to the exit status.
int exit_code_for(const std::string& error_code);

/// CSV with columns tau, stat, scaled_stat, lambda_estimate,
/// node_minus_<stat>, preceded by `header` lines written as comments.
/// Throws ConfigError on an empty history.
void emit_history(const CellSolution& solution, std::ostream& os,
                  const std::vector<std::string>& header = {}, Statistic stat = Statistic::median);
void emit_history(const CellSolution& solution, const std::filesystem::path& path,
                  const std::vector<std::string>& header = {}, Statistic stat = Statistic::median);

/// Shortest decimal string that reads back to the same double.
std::string format_double(double v);

}  // namespace effham::cli
