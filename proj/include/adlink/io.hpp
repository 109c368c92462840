#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace adlink::io {

std::string read_file(const std::filesystem::path& path);

/// Writes to a sibling temp file and renames it into place.
void write_atomic(const std::filesystem::path& path, std::string_view content);

std::string csv_escape(std::string_view field);

/// Splits one CSV record; handles double-quoted fields with "" escapes.
std::vector<std::string> csv_split(std::string_view line);

/// Parses CSV text into records, skipping blank lines and lines starting with '#'.
std::vector<std::vector<std::string>> parse_csv(std::string_view content);

/// Shortest decimal form that parses back to the same double.
std::string format_double(double v);

double parse_double(std::string_view s);
long long parse_int(std::string_view s);

/// FNV-1a 64-bit digest of a file's bytes as 16 lowercase hex chars.
std::string file_digest(const std::filesystem::path& path);

}  // namespace adlink::io
