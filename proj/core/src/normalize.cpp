#include "explcorpus/normalize.hpp"

#include "detail/utf8.hpp"

#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>

#include <stdexcept>
#include <string>

namespace explcorpus {

namespace {

constexpr UChar32 kSoftHyphen = 0x00AD;

struct Ligature {
    UChar32 cp;
    const char16_t* expansion;
};

// Presentation-form ligatures that PDF extractors commonly emit.
constexpr Ligature kLigatures[] = {
    {0xFB00, u"ff"}, {0xFB01, u"fi"}, {0xFB02, u"fl"}, {0xFB03, u"ffi"},
    {0xFB04, u"ffl"}, {0xFB05, u"st"}, {0xFB06, u"st"},
};

const icu::Normalizer2& nfkc() {
    static const icu::Normalizer2* instance = [] {
        UErrorCode status = U_ZERO_ERROR;
        const icu::Normalizer2* n = icu::Normalizer2::getNFKCInstance(status);
        return U_FAILURE(status) ? nullptr : n;
    }();
    if (instance == nullptr) {
        throw std::runtime_error("ICU NFKC normalizer unavailable");
    }
    return *instance;
}

bool is_horizontal_space(char32_t c) {
    return c == U' ' || c == U'\t' || (u_isUWhiteSpace(static_cast<UChar32>(c)) && c != U'\n' && c != U'\r' &&
                                       c != 0x2028 && c != 0x2029 && c != 0x0B && c != 0x0C && c != 0x85);
}

bool is_line_break(char32_t c) {
    return c == U'\n' || c == U'\r' || c == 0x2028 || c == 0x2029 || c == 0x0B || c == 0x0C || c == 0x85;
}

bool is_space(char32_t c) {
    if (c == U' ' || c == U'\n') return true;
    if (c < 0x80 && c > U' ') return false;
    return u_isUWhiteSpace(static_cast<UChar32>(c));
}

bool is_alpha(char32_t c) {
    if (c < 0x80) return (c >= U'a' && c <= U'z') || (c >= U'A' && c <= U'Z');
    return u_isalpha(static_cast<UChar32>(c));
}

bool is_line_hyphen(char32_t c) { return c == U'-' || c == 0x2010 || c == kSoftHyphen; }

// Index just past a "[hspace]* linebreak [whitespace]*" run starting at i, or
// npos if there is no line break there.
std::size_t skip_line_break(const std::u32string& s, std::size_t i) {
    const std::size_t n = s.size();
    while (i < n && is_horizontal_space(s[i])) ++i;
    if (i >= n || !is_line_break(s[i])) return std::u32string::npos;
    while (i < n && is_space(s[i])) ++i;
    return i;
}

std::u32string expand_ligatures_and_soft_hyphens(const std::u32string& in) {
    std::u32string out;
    out.reserve(in.size());
    for (std::size_t i = 0; i < in.size();) {
        char32_t c = in[i];
        if (c == kSoftHyphen) {
            // A soft hyphen at a line break also swallows the break.
            auto after = skip_line_break(in, i + 1);
            i = after != std::u32string::npos ? after : i + 1;
            continue;
        }
        bool replaced = false;
        if (c >= 0xFB00 && c <= 0xFB06) {
            for (const auto& lig : kLigatures) {
                if (static_cast<char32_t>(lig.cp) == c) {
                    for (const char16_t* e = lig.expansion; *e; ++e) out.push_back(*e);
                    replaced = true;
                    break;
                }
            }
        }
        if (!replaced) out.push_back(c);
        ++i;
    }
    return out;
}

std::u32string dehyphenate(const std::u32string& in) {
    std::u32string out;
    out.reserve(in.size());
    char32_t prev = 0;
    bool have_prev = false;
    for (std::size_t i = 0; i < in.size();) {
        char32_t c = in[i];
        if (is_line_hyphen(c) && have_prev && is_alpha(prev)) {
            auto after = skip_line_break(in, i + 1);
            if (after != std::u32string::npos && after < in.size() && is_alpha(in[after])) {
                i = after;
                continue;
            }
        }
        out.push_back(c);
        prev = c;
        have_prev = true;
        ++i;
    }
    return out;
}

std::u32string collapse_whitespace(const std::u32string& in) {
    std::u32string out;
    out.reserve(in.size());
    bool pending_space = false;
    for (char32_t c : in) {
        if (is_space(c)) {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space) {
            out.push_back(U' ');
            pending_space = false;
        }
        out.push_back(c);
    }
    return out;
}

std::u32string apply_nfkc(const std::u32string& s) {
    UErrorCode status = U_ZERO_ERROR;
    auto u = icu::UnicodeString::fromUTF32(reinterpret_cast<const UChar32*>(s.data()), static_cast<int32_t>(s.size()));
    if (nfkc().isNormalized(u, status) && U_SUCCESS(status)) return s;
    status = U_ZERO_ERROR;
    auto n = nfkc().normalize(u, status);
    if (U_FAILURE(status)) {
        throw std::runtime_error("NFKC normalization failed");
    }
    std::u32string out(static_cast<std::size_t>(n.countChar32()), U'\0');
    status = U_ZERO_ERROR;
    n.toUTF32(reinterpret_cast<UChar32*>(out.data()), static_cast<int32_t>(out.size()), status);
    if (U_FAILURE(status)) {
        throw std::runtime_error("NFKC normalization failed");
    }
    return out;
}

bool nfkc_normalized(const std::u32string& s) {
    UErrorCode status = U_ZERO_ERROR;
    auto u = icu::UnicodeString::fromUTF32(reinterpret_cast<const UChar32*>(s.data()), static_cast<int32_t>(s.size()));
    return nfkc().isNormalized(u, status) && U_SUCCESS(status);
}

std::u32string pipeline(const std::u32string& text) {
    return collapse_whitespace(dehyphenate(apply_nfkc(expand_ligatures_and_soft_hyphens(text))));
}

}  // namespace

std::string normalize(std::string_view text) {
    auto s = pipeline(detail::to_u32(text));
    // Joining across a removed break can form a sequence NFKC would rewrite;
    // one more pass reaches the fixed point in that case.
    if (!nfkc_normalized(s)) {
        s = pipeline(s);
    }
    return detail::to_utf8(s);
}

}  // namespace explcorpus
