#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace qnn::cli {

/// Exit codes: 0 ok, 2 validation or usage failure, 3 numeric failure, 4 I/O.
/// Errors go to `err` as {"error": code, "detail": text}.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace qnn::cli
