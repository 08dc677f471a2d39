#ifndef LDME_CLI_HPP
#define LDME_CLI_HPP

// Command-line entry point.  Exit codes: 0 success, 1 usage or input error,
// 2 verification failure.

#include <string>
#include <vector>

namespace ldme {

int run_cli(int argc, char** argv);

// Convenience overload; args[0] is the program name.
int run_cli(const std::vector<std::string>& args);

} // namespace ldme

#endif
