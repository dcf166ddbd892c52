#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>

#include "dcg/checks.hpp"

namespace dcg::cli {

enum ExitCode : int { ok = 0, check_failed = 1, config_error = 2, solver_error = 3 };

enum class Verbosity { quiet, info, debug };

/// Reads DCG_LOG (quiet | info | debug); info when unset or unrecognised.
Verbosity verbosity_from_env();

/// Loads the config, runs the solver, writes the trace CSV (if an output
/// path is configured) and prints a summary of the last record.
int cmd_run(const std::string& config_path, std::ostream& out, std::ostream& err,
            Verbosity v = Verbosity::info);

/// Writes a matcomp instance dump for the given seed, node count and radius.
int cmd_gen(std::uint64_t seed, std::size_t n, double radius, const std::string& out_path,
            std::ostream& out, std::ostream& err, Verbosity v = Verbosity::info);

/// Runs `oracles`, `bounds` or `all`, listing failures. Exit 0 iff all pass.
int cmd_check(const std::string& suite, std::ostream& out, std::ostream& err,
              const CheckOptions& opts = {}, Verbosity v = Verbosity::info);

/// Full command-line entry point (`run`, `gen`, `check`).
int main(int argc, char** argv);

}  // namespace dcg::cli
