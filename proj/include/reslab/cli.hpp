#pragma once

namespace reslab::cli {

// Full command-line entry point; returns the process exit code.
int run(int argc, const char* const* argv);

} // namespace reslab::cli
