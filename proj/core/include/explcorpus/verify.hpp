#pragma once

#include "explcorpus/corpus.hpp"
#include "explcorpus/normalize.hpp"
#include "explcorpus/records.hpp"
#include "explcorpus/verification.hpp"

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace explcorpus {

inline constexpr double kDefaultThreshold = 0.85;
/// Width of the near-miss band below the threshold that is listed for review.
inline constexpr double kReviewBand = 0.05;

struct MatchOptions {
    /// Evaluate every window start instead of the coarse-to-fine search.
    bool exhaustive = false;
    /// Coarse hits refined at stride 1.
    std::size_t refine_candidates = 3;
};

/// Document text prepared once for repeated quote lookups.
class PreparedText {
  public:
    explicit PreparedText(std::string_view text);  // normalizes
    const std::u32string& codepoints() const noexcept { return text_; }

  private:
    std::u32string text_;
};

/// Locates `quote` in `doc_text`. Both sides are normalized; windows of
/// 0.8x to 1.2x the quote length slide over the document, and the score of a
/// window is 1 - edit_distance / max(quote length, window length). Math
/// segments ($...$, \(...\), \[...\]) in the quote match any text up to three
/// times their length. Quotes with elided parts ("...") are matched fragment by
/// fragment and combined by length-weighted mean. An exact substring scores 1.
///
/// Throws std::invalid_argument for an empty quote or threshold outside (0, 1].
VerificationResult best_match(std::string_view quote, std::string_view doc_text, double threshold,
                              const MatchOptions& options = {});
VerificationResult best_match(std::string_view quote, const PreparedText& doc, double threshold,
                              const MatchOptions& options = {});

/// Plain Levenshtein distance over code points.
std::size_t edit_distance(std::u32string_view a, std::u32string_view b);

struct VerificationSummary {
    std::size_t verified = 0;
    std::size_t unverified = 0;
    std::size_t skipped = 0;
    std::size_t no_quote = 0;
    /// Indices into the dataset.
    std::vector<std::size_t> unverified_records;
    std::vector<std::size_t> review_records;  // similarity within kReviewBand below the threshold
    std::vector<std::size_t> skipped_records;
    std::vector<std::string> skip_reasons;     // parallel to skipped_records
};

struct VerifiedDataset {
    Dataset dataset;
    VerificationSummary summary;
};

/// Annotates every quoted record with a VerificationResult against the
/// normalized text of its source document. Records whose source is not in
/// the manifest (or whose text cannot be read) are skipped and reported.
VerifiedDataset verify_dataset(const Dataset& ds, const CorpusManifest& manifest, double threshold,
                               unsigned threads = 0);

}  // namespace explcorpus
