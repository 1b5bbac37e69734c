#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace gsq {

// Exit codes: 0 success, 1 usage, 2 input error, 3 internal invariant
// violation.
int cli_main(int argc, const char* const* argv);
int cli_run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace gsq
