#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace aprkit::text {

/// Splits on '\n'. join_lines(split_lines(t)) == t for every t; "" yields {""}.
std::vector<std::string> split_lines(std::string_view text);

std::string join_lines(const std::vector<std::string>& lines, std::size_t begin,
                       std::size_t end);
std::string join_lines(const std::vector<std::string>& lines);

/// Leading run of spaces and tabs.
std::string_view leading_whitespace(std::string_view line);

bool is_blank(std::string_view line);

std::string_view rtrim(std::string_view s);
std::string_view trim(std::string_view s);

/// CRLF and lone CR become LF.
std::string normalize_newlines(std::string_view s);

/// Collapses every whitespace run to a single space and trims the ends.
std::string collapse_whitespace(std::string_view s);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view content);

}  // namespace aprkit::text
