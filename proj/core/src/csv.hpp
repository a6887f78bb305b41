#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace a2pm::csv {

// RFC-4180: quoted fields may contain commas, quotes (doubled) and newlines.
// Accepts both LF and CRLF records. Throws DataError on unbalanced quotes.
std::vector<std::vector<std::string>> parse(const std::string& text);

std::vector<std::vector<std::string>> read_file(const std::filesystem::path& path);

std::string escape_field(const std::string& field);

void write_file(const std::filesystem::path& path,
                const std::vector<std::vector<std::string>>& records);

// Shortest decimal form that parses back to the same double.
std::string format_double(double v);

}  // namespace a2pm::csv
