#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace fclt {

/// Exit codes of fclt-lab.
inline constexpr int kExitOk = 0;
inline constexpr int kExitRefused = 1;
inline constexpr int kExitUsage = 2;

/// Runs one fclt-lab invocation. args[0] is the program name. Reports go to
/// `out` (or to --out files), diagnostics and refusal reports to `err`.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int dispatch(int argc, char** argv);

}  // namespace fclt
