#pragma once

#include <string>
#include <string_view>

namespace adlink::text {

/// Decodes UTF-8; each invalid byte becomes U+FFFD.
std::u32string decode_utf8(std::string_view s);
std::string encode_utf8(std::u32string_view s);

/// Number of codepoints, with the same invalid-byte policy as decode_utf8.
std::size_t codepoint_count(std::string_view s);

/// ASCII-only lowercase; bytes >= 0x80 pass through unchanged.
std::string ascii_lower(std::string_view s);

inline bool is_ascii_alnum(char32_t c) {
    return (c >= U'a' && c <= U'z') || (c >= U'A' && c <= U'Z') || (c >= U'0' && c <= U'9');
}

inline bool is_ascii_space(char32_t c) {
    return c == U' ' || c == U'\t' || c == U'\n' || c == U'\r' || c == U'\f' || c == U'\v';
}

std::string collapse_spaces(std::string_view s);

}  // namespace adlink::text
