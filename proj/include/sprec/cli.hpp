#pragma once

#include <iosfwd>

namespace sprec {

/// Entry point of the sprec command line. Returns the process exit code:
/// 0 when the requested artifact was written, 1 on runtime errors, and 2 on
/// invalid flags.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace sprec
