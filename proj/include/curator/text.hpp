#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace curator::text {

bool is_valid_utf8(std::string_view s) noexcept;

/// Byte offsets of every code point start, plus a trailing s.size().
/// Input must be valid UTF-8.
std::vector<std::size_t> codepoint_offsets(std::string_view s);

std::string ascii_lower(std::string_view s);

/// Split on ASCII whitespace. Views point into `s`.
std::vector<std::string_view> split_ws(std::string_view s);

/// Split on ASCII whitespace and lowercase each token.
std::vector<std::string> lower_words(std::string_view s);

/// Split on Unicode whitespace, lowercase ASCII letters, strip leading and
/// trailing non-alphanumeric ASCII characters from each token and drop tokens
/// that become empty. Non-ASCII code points count as alphanumeric.
std::vector<std::string> normalized_words(std::string_view s);

std::size_t word_count(std::string_view s);

std::string join(const std::vector<std::string>& parts, std::string_view sep,
                 std::size_t first = 0, std::size_t count = std::string::npos);

std::string to_hex(const unsigned char* data, std::size_t n);

}  // namespace curator::text
