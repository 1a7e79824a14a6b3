#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace pano360::cli {

/// Entry point shared by the executable and the tests. Reports go to `out` as JSON, diagnostics
/// to `err`. Returns 0 iff every output was written and every validation passed.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run(int argc, const char* const* argv);
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pano360::cli
