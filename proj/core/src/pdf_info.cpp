#include "pdf_info.hpp"

#include <unicode/unistr.h>

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iterator>
#include <regex>

namespace explcorpus::detail {

namespace {

constexpr std::string_view kKeys[] = {"Title", "Author", "Subject", "Keywords"};

// Reads a PDF literal string starting after '('. Handles nesting and the
// standard backslash escapes.
std::string read_literal(std::string_view s, std::size_t& i) {
    std::string out;
    int depth = 1;
    while (i < s.size()) {
        char c = s[i++];
        if (c == '\\' && i < s.size()) {
            char e = s[i++];
            switch (e) {
                case 'n': out.push_back('\n'); break;
                case 'r': out.push_back('\r'); break;
                case 't': out.push_back('\t'); break;
                case 'b': out.push_back('\b'); break;
                case 'f': out.push_back('\f'); break;
                case '\r':
                    if (i < s.size() && s[i] == '\n') ++i;
                    break;
                case '\n': break;
                default:
                    if (e >= '0' && e <= '7') {
                        int v = e - '0';
                        for (int k = 0; k < 2 && i < s.size() && s[i] >= '0' && s[i] <= '7'; ++k) {
                            v = v * 8 + (s[i++] - '0');
                        }
                        out.push_back(static_cast<char>(v & 0xff));
                    } else {
                        out.push_back(e);
                    }
            }
            continue;
        }
        if (c == '(') {
            ++depth;
        } else if (c == ')') {
            if (--depth == 0) {
                break;
            }
        }
        out.push_back(c);
    }
    return out;
}

std::string read_hex(std::string_view s, std::size_t& i) {
    std::string digits;
    while (i < s.size() && s[i] != '>') {
        if (std::isxdigit(static_cast<unsigned char>(s[i]))) {
            digits.push_back(s[i]);
        }
        ++i;
    }
    ++i;
    if (digits.size() % 2) {
        digits.push_back('0');
    }
    std::string out;
    for (std::size_t k = 0; k + 1 < digits.size(); k += 2) {
        out.push_back(static_cast<char>(std::stoi(digits.substr(k, 2), nullptr, 16)));
    }
    return out;
}

// PDF text strings are UTF-16BE with a BOM or PDFDocEncoding (treated as Latin-1).
std::string decode_text_string(const std::string& raw) {
    icu::UnicodeString u;
    if (raw.size() >= 2 && static_cast<unsigned char>(raw[0]) == 0xFE &&
        static_cast<unsigned char>(raw[1]) == 0xFF) {
        for (std::size_t k = 2; k + 1 < raw.size(); k += 2) {
            u.append(static_cast<UChar>((static_cast<unsigned char>(raw[k]) << 8) |
                                        static_cast<unsigned char>(raw[k + 1])));
        }
    } else if (raw.size() >= 3 && raw.compare(0, 3, "\xEF\xBB\xBF") == 0) {
        u = icu::UnicodeString::fromUTF8(icu::StringPiece(raw.data() + 3, static_cast<int32_t>(raw.size() - 3)));
    } else {
        for (unsigned char c : raw) {
            u.append(static_cast<UChar>(c));
        }
    }
    std::string out;
    u.toUTF8String(out);
    return out;
}

}  // namespace

std::optional<std::string> PdfInfo::get(std::string_view key) const {
    auto it = fields.find(std::string(key));
    if (it == fields.end() || it->second.empty()) {
        return std::nullopt;
    }
    return it->second;
}

PdfInfo scan_pdf_info(std::string_view bytes) {
    PdfInfo info;
    for (auto key : kKeys) {
        std::string needle = "/" + std::string(key);
        std::size_t pos = 0;
        while ((pos = bytes.find(needle, pos)) != std::string_view::npos) {
            std::size_t i = pos + needle.size();
            pos = i;
            // Reject longer names such as /TitleX.
            if (i < bytes.size() && std::isalnum(static_cast<unsigned char>(bytes[i]))) {
                continue;
            }
            while (i < bytes.size() && std::isspace(static_cast<unsigned char>(bytes[i]))) {
                ++i;
            }
            if (i >= bytes.size()) {
                break;
            }
            std::string raw;
            if (bytes[i] == '(') {
                ++i;
                raw = read_literal(bytes, i);
            } else if (bytes[i] == '<' && i + 1 < bytes.size() && bytes[i + 1] != '<') {
                ++i;
                raw = read_hex(bytes, i);
            } else {
                continue;
            }
            auto value = decode_text_string(raw);
            if (!value.empty()) {
                info.fields.emplace(std::string(key), std::move(value));
                break;
            }
        }
    }
    return info;
}

std::optional<PdfInfo> read_pdf_info(const std::filesystem::path& pdf_path) {
    std::ifstream in(pdf_path, std::ios::binary);
    if (!in) {
        return std::nullopt;
    }
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (bytes.compare(0, 5, "%PDF-") != 0) {
        return std::nullopt;
    }
    return scan_pdf_info(bytes);
}

std::optional<std::string> find_category_tag(std::string_view text) {
    static const std::regex kTag(
        R"((?:^|[^A-Za-z0-9])((math|cs|stat|physics|q-bio|q-fin|eess|econ|nlin|astro-ph|cond-mat)\.([A-Za-z]{2}))(?![A-Za-z]))",
        std::regex::ECMAScript | std::regex::icase);
    std::match_results<std::string_view::const_iterator> m;
    if (!std::regex_search(text.begin(), text.end(), m, kTag)) {
        return std::nullopt;
    }
    std::string archive = m[2].str();
    std::string subject = m[3].str();
    std::transform(archive.begin(), archive.end(), archive.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    std::transform(subject.begin(), subject.end(), subject.begin(),
                   [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    return archive + "." + subject;
}

}  // namespace explcorpus::detail
