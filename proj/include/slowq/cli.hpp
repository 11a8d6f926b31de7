#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace slowq {

/// Front-end entry point; args exclude the program name. Returns the process
/// exit code: 0 success, 1 numerical failure, 2 flag/validation error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace slowq
