// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <string_view>
#include <vector>

// Small string helpers shared across modules.
namespace tactix::text {

std::string_view trim(std::string_view s);
std::string_view rtrim(std::string_view s);
std::string to_lower(std::string_view s);
bool starts_with_ci(std::string_view s, std::string_view prefix);
bool contains_ci(std::string_view haystack, std::string_view needle);

/// Split on '\n'; a trailing newline does not produce an empty last line.
std::vector<std::string_view> split_lines(std::string_view s);
/// Split on a single character; keeps empty fields.
std::vector<std::string_view> split(std::string_view s, char sep);
std::string join(const std::vector<std::string>& parts, std::string_view sep);

/// Drop leading and trailing blank lines, keep inner layout.
std::string trim_blank_lines(std::string_view s);

std::string replace_all(std::string s, std::string_view from, std::string_view to);

/// Replace invalid UTF-8 sequences with U+FFFD; valid input is returned unchanged.
std::string sanitize_utf8(std::string_view s);

/// 64-bit FNV-1a, hex encoded.
std::string fnv1a_hex(std::string_view data);

}  // namespace tactix::text
