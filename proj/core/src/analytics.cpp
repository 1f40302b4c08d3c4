#include "explcorpus/analytics.hpp"

#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

namespace explcorpus {

namespace {

std::size_t slot(SubjectArea a) noexcept { return static_cast<std::size_t>(a); }

}  // namespace

DistributionTable::DistributionTable(const std::array<std::uint64_t, kAllAreas.size()>& counts) : counts_(counts) {
    for (auto c : counts_) total_ += c;
}

std::uint64_t DistributionTable::count(SubjectArea area) const noexcept { return counts_[slot(area)]; }

double DistributionTable::share(SubjectArea area) const noexcept {
    if (total_ == 0) return 0.0;
    return static_cast<double>(counts_[slot(area)]) / static_cast<double>(total_);
}

void DistributionTable::add(SubjectArea area, std::uint64_t n) noexcept {
    counts_[slot(area)] += n;
    total_ += n;
}

void TierFractions::validate() const {
    for (double f : {high, borderline, low}) {
        if (!(f >= 0.0 && f <= 1.0)) throw std::invalid_argument("tier fractions must lie in [0, 1]");
    }
    if (std::fabs(high + borderline + low - 1.0) > 1e-9) {
        throw std::invalid_argument("tier fractions must sum to 1");
    }
}

TierFractions TierFractions::parse(std::string_view text) {
    std::vector<double> parts;
    std::stringstream in{std::string(text)};
    std::string item;
    while (std::getline(in, item, ',')) {
        try {
            std::size_t used = 0;
            parts.push_back(std::stod(item, &used));
            if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
        } catch (const std::logic_error&) {
            throw std::invalid_argument("bad tier fraction '" + item + "'");
        }
    }
    if (parts.size() != 3) throw std::invalid_argument("expected three tier fractions: high,borderline,low");
    TierFractions t{parts[0], parts[1], parts[2]};
    t.validate();
    return t;
}

DistributionTable corpus_distribution(const CorpusManifest& manifest, const Taxonomy& taxonomy) {
    DistributionTable t;
    for (const auto& d : manifest.documents()) t.add(taxonomy.classify(d.category_tag));
    return t;
}

DatasetDistribution dataset_distribution(const Dataset& ds, const CorpusManifest& manifest, const Taxonomy& taxonomy) {
    std::set<std::string> seen;
    std::set<std::string> unresolved;
    DatasetDistribution out;
    for (const auto& r : ds.records) {
        if (!seen.insert(r.source_doc_id).second) continue;
        const auto* ref = manifest.find(r.source_doc_id);
        if (!ref) {
            unresolved.insert(r.source_doc_id);
            continue;
        }
        out.table.add(taxonomy.classify(ref->category_tag));
    }
    out.unresolved_doc_ids.assign(unresolved.begin(), unresolved.end());
    return out;
}

std::vector<RichnessRow> richness_table(const DistributionTable& corpus, const DistributionTable& dataset) {
    std::vector<RichnessRow> rows;
    for (auto area : kNamedAreas) {
        RichnessRow r;
        r.area = area;
        r.corpus_share = corpus.share(area);
        r.dataset_share = dataset.share(area);
        if (r.corpus_share > 0.0 && !dataset.empty()) r.coefficient = r.dataset_share / r.corpus_share;
        rows.push_back(r);
    }
    return rows;
}

PrevalenceEstimate prevalence_estimate(std::uint64_t contributing, std::uint64_t total, const TierFractions& tiers) {
    if (total == 0) throw std::invalid_argument("total papers must be positive");
    if (contributing > total) throw std::invalid_argument("contributing papers exceed total");
    tiers.validate();
    PrevalenceEstimate p;
    p.contributing_papers = contributing;
    p.total_papers = total;
    p.tier_fractions = tiers;
    const double c = static_cast<double>(contributing);
    const double n = static_cast<double>(total);
    p.clear_rate = c * tiers.high / n;
    p.borderline_or_better_rate = c * (tiers.high + tiers.borderline) / n;
    return p;
}

}  // namespace explcorpus
