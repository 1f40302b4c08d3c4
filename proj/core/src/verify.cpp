#include "explcorpus/verify.hpp"

#include "detail/parallel.hpp"
#include "explcorpus/error.hpp"

#include <map>
#include <memory>
#include <mutex>

namespace explcorpus {

VerifiedDataset verify_dataset(const Dataset& ds, const CorpusManifest& manifest, double threshold,
                               unsigned threads) {
    if (!(threshold > 0.0 && threshold <= 1.0)) {
        throw std::invalid_argument("threshold must lie in (0, 1]");
    }
    VerifiedDataset out;
    out.dataset = ds;
    auto& records = out.dataset.records;

    // Load each referenced document once.
    struct Source {
        std::shared_ptr<const PreparedText> text;
        std::string error;
    };
    std::map<std::string, Source> sources;
    for (const auto& r : records) {
        if (r.quote && !r.quote->empty()) {
            sources.emplace(r.source_doc_id, Source{});
        }
    }
    std::vector<std::map<std::string, Source>::iterator> pending;
    for (auto it = sources.begin(); it != sources.end(); ++it) {
        pending.push_back(it);
    }
    detail::parallel_for(pending.size(), threads, [&](std::size_t i) {
        auto& [doc_id, src] = *pending[i];
        const DocumentRef* ref = manifest.find(doc_id);
        if (!ref) {
            src.error = doc_id.empty() ? "record names no source file" : "source '" + doc_id + "' not in manifest";
            return;
        }
        try {
            src.text = std::make_shared<const PreparedText>(load_text(*ref));
        } catch (const MissingTextError& e) {
            src.error = e.what();
        }
    });

    std::vector<std::optional<std::string>> skip(records.size());
    detail::parallel_for(records.size(), threads, [&](std::size_t i) {
        auto& r = records[i];
        if (!r.quote || r.quote->empty()) {
            r.verification.reset();
            return;
        }
        const auto& src = sources.at(r.source_doc_id);
        if (!src.text) {
            skip[i] = src.error;
            r.verification.reset();
            return;
        }
        r.verification = best_match(*r.quote, *src.text, threshold);
    });

    auto& s = out.summary;
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto& r = records[i];
        if (!r.quote || r.quote->empty()) {
            ++s.no_quote;
        } else if (skip[i]) {
            ++s.skipped;
            s.skipped_records.push_back(i);
            s.skip_reasons.push_back(*skip[i]);
        } else if (r.verification->matched) {
            ++s.verified;
        } else {
            ++s.unverified;
            s.unverified_records.push_back(i);
            if (r.verification->similarity >= threshold - kReviewBand) {
                s.review_records.push_back(i);
            }
        }
    }
    return out;
}

}  // namespace explcorpus
