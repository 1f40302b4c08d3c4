#pragma once

#include <cstddef>
#include <string>
#include <string_view>

namespace explcorpus::detail {

/// Number of code points in well-formed UTF-8 (continuation bytes are not counted).
std::size_t codepoint_count(std::string_view s) noexcept;

/// Decodes UTF-8; malformed sequences become U+FFFD.
std::u32string to_u32(std::string_view s);
std::string to_utf8(std::u32string_view s);

/// Byte offset of the code point with index `cp_index`, or s.size() if past the end.
std::size_t byte_offset(std::string_view s, std::size_t cp_index) noexcept;

}  // namespace explcorpus::detail
