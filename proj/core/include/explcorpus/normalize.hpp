#pragma once

#include <string>
#include <string_view>

namespace explcorpus {

/// Canonical text form shared by corpus loading and quote verification.
///
/// Applied in order: ligature expansion and soft-hyphen removal, Unicode
/// compatibility normalization (NFKC), joining of words hyphenated across a
/// line break ("mathe-\nmatics" -> "mathematics"), and collapsing every
/// whitespace run to a single space with the ends trimmed. Case is preserved.
/// The result is a fixed point: normalize(normalize(t)) == normalize(t).
std::string normalize(std::string_view text);

}  // namespace explcorpus
