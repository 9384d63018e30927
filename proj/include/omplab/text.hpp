#pragma once

// Number formatting and parsing used by every file format. All output
// goes through g17() so that doubles survive a write/read round trip
// bit-for-bit; parsing is strtod-based and locale-independent.

#include <cstdint>
#include <string>
#include <vector>

namespace omplab {

// Shortest-ish decimal form with 17 significant digits ("%.17g").
std::string g17(double v);

double parse_double(const std::string& token, const std::string& context);
std::uint64_t parse_uint(const std::string& token, const std::string& context);

std::vector<std::string> split(const std::string& line, char sep);
std::vector<std::string> split_ws(const std::string& line);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace omplab
