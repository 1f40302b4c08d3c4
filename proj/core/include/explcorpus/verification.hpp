#pragma once

#include <cstddef>
#include <optional>

namespace explcorpus {

/// Outcome of locating a quote in its source text. Spans are code-point
/// offsets into the normalized document, half-open, present iff matched.
struct VerificationResult {
    bool matched = false;
    double similarity = 0.0;
    std::optional<std::size_t> span_start;
    std::optional<std::size_t> span_end;
    double threshold_used = 0.0;

    friend bool operator==(const VerificationResult&, const VerificationResult&) = default;
};

}  // namespace explcorpus
