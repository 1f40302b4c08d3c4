#include "detail/utf8.hpp"

#include <unicode/unistr.h>

namespace explcorpus::detail {

std::size_t codepoint_count(std::string_view s) noexcept {
    std::size_t n = 0;
    for (unsigned char c : s) {
        n += (c & 0xC0) != 0x80;
    }
    return n;
}

std::u32string to_u32(std::string_view s) {
    auto u = icu::UnicodeString::fromUTF8(icu::StringPiece(s.data(), static_cast<int32_t>(s.size())));
    std::u32string out(static_cast<std::size_t>(u.countChar32()), U'\0');
    UErrorCode status = U_ZERO_ERROR;
    int32_t written = u.toUTF32(reinterpret_cast<UChar32*>(out.data()), static_cast<int32_t>(out.size()), status);
    out.resize(static_cast<std::size_t>(written));
    return out;
}

std::string to_utf8(std::u32string_view s) {
    auto u = icu::UnicodeString::fromUTF32(reinterpret_cast<const UChar32*>(s.data()), static_cast<int32_t>(s.size()));
    std::string out;
    u.toUTF8String(out);
    return out;
}

std::size_t byte_offset(std::string_view s, std::size_t cp_index) noexcept {
    std::size_t seen = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if ((static_cast<unsigned char>(s[i]) & 0xC0) != 0x80) {
            if (seen == cp_index) {
                return i;
            }
            ++seen;
        }
    }
    return s.size();
}

}  // namespace explcorpus::detail
