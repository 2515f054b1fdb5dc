#pragma once

#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace terraclass::cli {

inline constexpr std::string_view kToolkitVersion = "1.0.0";
inline constexpr std::string_view kFormatVersion = "1";

/// Runs one CLI invocation. `args` excludes the program name. Data goes to
/// `out`, diagnostics to `err`. Returns 0 on success, 1 on validation or
/// usage errors, 2 on I/O errors.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace terraclass::cli
