#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace hest {

// Command-line front end. `args` excludes the program name. Returns the
// process exit status: 0 on success, 2 on configuration errors, 3 on data
// errors. Normal output goes to `out`, diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hest
