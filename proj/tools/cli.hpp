#pragma once

namespace polykde::cli {

// Entry point behind main(); returns the process exit code
// (0 ok, 1 data error, 2 usage error).
int run(int argc, const char* const* argv);

}  // namespace polykde::cli
