#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "btv/checker.hpp"

namespace btv::cli {

enum ExitCode : int {
  kOk = 0,
  kFailed = 1,      // violated, deadlock, domain violation, invalid tree
  kUsage = 2,       // bad flags, unreadable file, parse or model error
  kBoundExceeded = 3,
};

int exit_code(Status status);

/// Runs one command line. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace btv::cli
