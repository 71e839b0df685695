#pragma once

#include "fractalnet/errors.hpp"

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace fractalnet::detail {

std::vector<std::string> split_csv_line(std::string_view line);
std::string trim(std::string_view s);
std::string unquote(std::string_view s);
std::optional<double> parse_double(std::string_view s);

/// Reads a whole text file into lines; throws IoError naming the path.
std::vector<std::string> read_lines(const std::filesystem::path& path);

/// Opens a file for writing; throws IoError naming the path.
std::ofstream open_for_write(const std::filesystem::path& path);
void finish_write(std::ofstream& out, const std::filesystem::path& path);

/// "# key=value" comment line; returns value if the key matches.
std::optional<std::string> comment_value(std::string_view line, std::string_view key);

}  // namespace fractalnet::detail
