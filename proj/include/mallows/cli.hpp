#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mallows {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitThresholds = 3;

// Runs the mallows_lab command line; args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mallows
