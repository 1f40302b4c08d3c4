#pragma once

#include <cstdint>
#include <string_view>

namespace explcorpus {

/// Conservative token estimate: ceil(code_points / 4), plus a 10% margin,
/// rounded up. Monotone in input length; 0 for empty text.
std::uint64_t estimate_tokens(std::string_view text) noexcept;
std::uint64_t estimate_tokens_for_chars(std::uint64_t code_points) noexcept;

}  // namespace explcorpus
