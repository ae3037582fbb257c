#pragma once

#include <cstddef>
#include <iosfwd>
#include <string_view>
#include <vector>

namespace mtc::cli {

/// Entry point of the `mtc` tool. Returns the process exit status.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Parses "15,20,40" and ranges "15:65:5" (inclusive), mixed with commas.
/// The result is sorted and deduplicated.
std::vector<std::size_t> parse_k_list(std::string_view text);

}  // namespace mtc::cli
