#pragma once

namespace sopf::cli {

/// Parses the command line and runs one subcommand. Returns the process exit
/// code: 0 success, 1 certification or validation failure, 2 I/O or config error.
int run_cli(int argc, const char* const* argv);

}  // namespace sopf::cli
