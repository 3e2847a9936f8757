#pragma once

#include <ostream>

namespace pcn {

/// Entry point of the pcnsim command line. Returns the process exit code;
/// diagnostics go to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace pcn
