#pragma once

// Batch front end: one subcommand per verification, KEY=VALUE report lines.

#include <iosfwd>
#include <string>
#include <vector>

namespace iwk1 {

struct CommandResult {
    // 0 pass, 1 fail, 2 usage or input error, 3 integrality failure
    int exit_code = 0;
    std::vector<std::string> lines;
};

// argv[0] is the program name.  Report lines go to `out` (and into the
// result); diagnostics go to `err`.
CommandResult run(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err);

}  // namespace iwk1
