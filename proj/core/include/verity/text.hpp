#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace verity {

/// Lowercases ASCII letters and splits on runs of characters that are not
/// ASCII alphanumerics. Bytes >= 0x80 are kept inside tokens so UTF-8 words
/// stay whole.
std::vector<std::string> tokenize(std::string_view text);

/// Trims ASCII whitespace at both ends.
std::string_view trim(std::string_view s) noexcept;

/// ASCII lowercase copy.
std::string ascii_lower(std::string_view s);

/// Replaces every occurrence of `from` in `s` with `to`.
std::string replace_all(std::string s, std::string_view from, std::string_view to);

/// Splits on '\n', dropping a trailing '\r' from each line.
std::vector<std::string_view> split_lines(std::string_view text);

}  // namespace verity
