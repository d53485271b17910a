#pragma once

#include <cstdint>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace dsrim {

/// Lowercases ASCII letters and splits on every run of bytes that are not ASCII
/// letters or digits. Non-ASCII bytes act as separators.
std::vector<std::string> tokenize(std::string_view text);

/// Splits on a single-character delimiter; empty fields are kept.
std::vector<std::string_view> split(std::string_view line, char delimiter);

/// Splits on runs of spaces/tabs; empty fields are dropped.
std::vector<std::string_view> split_whitespace(std::string_view line);

std::string_view trim(std::string_view text);

std::optional<double> parse_double(std::string_view text);
std::optional<long long> parse_int(std::string_view text);

/// Shortest decimal representation that parses back to the same double.
std::string format_double(double value);

/// Reads the next line, stripping a trailing '\r'. Increments `line_no`.
bool read_line(std::istream& in, std::string& line, std::size_t& line_no);

/// True for blank lines and lines starting with '#'.
bool is_comment_or_blank(std::string_view line);

/// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view bytes, std::uint64_t hash = 0xcbf29ce484222325ULL);
std::string hex64(std::uint64_t value);

}  // namespace dsrim
