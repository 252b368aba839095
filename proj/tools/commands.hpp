#ifndef KLJN_TOOLS_COMMANDS_HPP_
#define KLJN_TOOLS_COMMANDS_HPP_

#include <iosfwd>
#include <string>
#include <vector>

namespace kljn::cli {

inline constexpr const char *kToolVersion = "0.1.0";

enum ExitCode : int { kOk = 0, kUsage = 2, kRuntime = 3 };

/// Entry point shared by the executable and the tests. `args` excludes the
/// program name.
int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

}  // namespace kljn::cli

#endif  // KLJN_TOOLS_COMMANDS_HPP_
