#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace qzmac {

/// Entry point of the `qzmac` experiment runner. `args` excludes the program
/// name. Returns the process exit status.
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qzmac
