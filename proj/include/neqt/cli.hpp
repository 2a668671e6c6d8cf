#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace neqt::cli {

inline constexpr int exit_ok = 0;
inline constexpr int exit_validation = 1;
inline constexpr int exit_numerical = 2;
inline constexpr int exit_usage = 64;

/// Runs one subcommand. `args` excludes the program name.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int dispatch(int argc, char** argv);

/// "0" is sample site 0, "1:3" is site 3 of lead 1.
struct SiteArg {
    int lead = -1;
    int index = 0;
};
SiteArg parse_site(const std::string& text);

} // namespace neqt::cli
