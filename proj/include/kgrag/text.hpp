#pragma once

#include <filesystem>
#include <initializer_list>
#include <utility>
#include <string>
#include <string_view>
#include <vector>

// Small UTF-8 and filesystem helpers shared by every module.
namespace kgrag::text {

// Decodes UTF-8 into code points; invalid bytes map to U+FFFD.
std::vector<char32_t> decode_utf8(std::string_view s);
std::string encode_utf8(char32_t cp);

bool is_space(char32_t cp);

// Trims ASCII whitespace and U+3000 (ideographic space) from both ends.
std::string trim(std::string_view s);

// Trims and collapses internal whitespace runs to one ASCII space.
std::string normalize_whitespace(std::string_view s);

bool is_ascii(std::string_view s);
bool contains_line_break(std::string_view s);

std::vector<std::string> split_lines(std::string_view s);

std::string to_lower_ascii(std::string_view s);

// Replaces the first occurrence of `placeholder`; the replacement is never rescanned.
std::string replace_once(std::string_view tmpl, std::string_view placeholder,
                         std::string_view value);

// Replaces the first occurrence of each slot in one pass over `tmpl`;
// substituted values are never rescanned.
std::string fill_slots(std::string_view tmpl,
                       std::initializer_list<std::pair<std::string_view, std::string_view>> slots);

std::string sha256_hex(std::string_view data);

std::string url_encode(std::string_view s);

// Maps an identifier onto a safe single path component.
std::string sanitize_filename(std::string_view s);

std::string read_file(const std::filesystem::path& path);

// Writes via a uniquely named temporary in the same directory, then renames.
void atomic_write_file(const std::filesystem::path& path, std::string_view data);

} // namespace kgrag::text
