#pragma once

#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace gridscope::csv {

std::string_view trim(std::string_view s);

// Splits one record on commas; double-quoted fields may contain commas and
// "" escapes. Fields are whitespace-trimmed.
std::vector<std::string> split_line(std::string_view line);

// Reads the next non-blank line, stripping a trailing '\r'. Increments
// `line_no` for every physical line consumed.
bool next_record(std::istream& in, std::string& line, std::size_t& line_no);

std::optional<double> parse_double(std::string_view field);

// Shortest representation that round-trips.
std::string format_double(double v);

std::string quote_if_needed(std::string_view field);

}  // namespace gridscope::csv
