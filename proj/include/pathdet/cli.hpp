#ifndef PATHDET_CLI_HPP
#define PATHDET_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace pathdet {

// Overrides the output directory when neither --output-dir nor the config sets one.
constexpr const char* kOutputDirEnv = "PATHDET_OUTPUT_DIR";

// Exit codes: 0 pass, 2 a check failed, 1 usage or IO error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, const char* const* argv);

} // namespace pathdet

#endif
