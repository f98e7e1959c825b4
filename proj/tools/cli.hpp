#pragma once

#include <string>

namespace sclera::cli {

/// Parses and executes one command line. Returns the process exit code:
/// 0 success, 1 usage error, 2 data error, 3 numerical failure.
int run(int argc, const char* const* argv);

/// Layer table of a built-in architecture at its default size:
/// fast-yolo, fcn, segnet, gan-generator or gan-discriminator.
std::string describe_model(const std::string& name);

}  // namespace sclera::cli
