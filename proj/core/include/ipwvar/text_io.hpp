#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ipwvar {

// Shortest representation that parses back to the same double.
std::string format_number(double value);

// Strict decimal parse of a whole field; nullopt on trailing junk.
std::optional<double> parse_number(std::string_view field);

// Splits one comma-delimited line and trims surrounding whitespace.
// Quoted fields are not supported.
std::vector<std::string> split_fields(std::string_view line);

bool is_missing(std::string_view field) noexcept;

// Blank lines and '#' comment lines carry no data.
bool is_skippable_line(std::string_view line) noexcept;

}  // namespace ipwvar
