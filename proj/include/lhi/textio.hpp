#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace lhi::textio {

// Shortest representation that round-trips a double exactly ("%.17g").
std::string format_double(double value);

// Parses a double; the entire token must be consumed.
double parse_double(std::string_view token, std::size_t line_for_error = 0);

// Splits on runs of spaces/tabs; leading/trailing whitespace ignored.
std::vector<std::string_view> split_ws(std::string_view line);

std::string read_file(const std::filesystem::path& path);

// Writes to "<path>.tmp" then renames, so readers never observe partial files.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

// FNV-1a 64-bit, used as the checkpoint payload checksum.
std::uint64_t fnv1a64(std::string_view bytes);
std::string to_hex(std::uint64_t value);

std::string join_csv(const std::vector<std::string>& fields);

}  // namespace lhi::textio
