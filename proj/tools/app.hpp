#pragma once

#include <iosfwd>
#include <optional>
#include <string>

namespace meanfield::cli {

inline constexpr const char* kVersion = "1.0.0";

enum ExitStatus : int { kOk = 0, kConfigError = 2, kNumericalFailure = 3 };

struct RunOptions {
  std::string command;
  std::string config_path;
  std::string out_dir = ".";
  std::optional<double> h;
  bool quiet = false;
};

/// Runs one command, writing report.json and command-specific files into
/// out_dir. Errors become an exit status plus one diagnostic line on `diag`.
int run(const RunOptions& options, std::ostream& diag);

/// Argument parsing front end for the `meanfield` executable.
int main_entry(int argc, char** argv);

}  // namespace meanfield::cli
