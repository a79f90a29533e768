#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace homeadv::cli {

// Runs one subcommand. `args` excludes the program name. Failures print a
// single line "error: <class>: <message>" to `err` and return nonzero.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace homeadv::cli
