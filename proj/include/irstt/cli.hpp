#pragma once

#include "irstt/config.hpp"

#include <ostream>
#include <string>

namespace irstt {

// Runs one subcommand (sweep, rip, gradcheck, demo) and writes its artifacts
// under cfg.out. Returns the process exit status.
int execute(const std::string& command, const RunConfig& cfg, std::ostream& log);

// Full command-line entry point.
int cli_main(int argc, char** argv);

} // namespace irstt
