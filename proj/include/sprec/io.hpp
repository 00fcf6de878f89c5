#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace sprec {

/// Shortest decimal text that parses back to exactly the same double.
std::string format_double(double v);
/// Parses the whole string as a double; throws FormatError otherwise.
double parse_double(std::string_view s);

/// Writes to "<path>.tmp" and renames over path, so readers never observe a
/// partial file.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace sprec
