#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include "mourrekit/cli/config.hpp"

namespace mk::cli {

enum ExitCode : int { exit_ok = 0, exit_failed = 2, exit_config = 3, exit_degenerate = 4 };

int cmd_certify(const RunConfig& cfg, const std::string& out_dir, std::uint64_t seed, std::ostream& log);
int cmd_spectrum(const RunConfig& cfg, const std::string& out_dir, std::uint64_t seed, std::ostream& log);
int cmd_timechange(const RunConfig& cfg, const std::string& out_dir, std::uint64_t seed, std::ostream& log);

// Full command line front end; returns the process exit code.
int run(int argc, char** argv);

}  // namespace mk::cli
