#pragma once

#include "explcorpus/corpus.hpp"
#include "explcorpus/records.hpp"
#include "explcorpus/taxonomy.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace explcorpus {

/// Per-area counts over all nine areas (Other included).
class DistributionTable {
  public:
    DistributionTable() = default;
    explicit DistributionTable(const std::array<std::uint64_t, kAllAreas.size()>& counts);

    std::uint64_t count(SubjectArea area) const noexcept;
    /// count / total; 0 for an empty table.
    double share(SubjectArea area) const noexcept;
    std::uint64_t total() const noexcept { return total_; }
    bool empty() const noexcept { return total_ == 0; }

    void add(SubjectArea area, std::uint64_t n = 1) noexcept;

    friend bool operator==(const DistributionTable&, const DistributionTable&) = default;

  private:
    std::array<std::uint64_t, kAllAreas.size()> counts_{};
    std::uint64_t total_ = 0;
};

struct RichnessRow {
    SubjectArea area = SubjectArea::Other;
    double corpus_share = 0.0;   // C
    double dataset_share = 0.0;  // D
    /// D / C; absent when C is 0 or the dataset is empty.
    std::optional<double> coefficient;
};

struct TierFractions {
    double high = 0.20;
    double borderline = 0.60;
    double low = 0.20;

    /// Throws std::invalid_argument unless each fraction is in [0, 1] and they sum to 1 within 1e-9.
    void validate() const;
    /// "h,b,l", e.g. "0.2,0.6,0.2".
    static TierFractions parse(std::string_view text);
};

struct PrevalenceEstimate {
    std::uint64_t contributing_papers = 0;
    std::uint64_t total_papers = 0;
    TierFractions tier_fractions;
    double clear_rate = 0.0;
    double borderline_or_better_rate = 0.0;
};

DistributionTable corpus_distribution(const CorpusManifest& manifest, const Taxonomy& taxonomy = Taxonomy::builtin());

struct DatasetDistribution {
    DistributionTable table;
    /// Distinct source ids with no manifest entry, sorted; excluded from the table.
    std::vector<std::string> unresolved_doc_ids;
};

/// Counts distinct contributing papers per area.
DatasetDistribution dataset_distribution(const Dataset& ds, const CorpusManifest& manifest,
                                         const Taxonomy& taxonomy = Taxonomy::builtin());

/// One row per named area in report order.
std::vector<RichnessRow> richness_table(const DistributionTable& corpus, const DistributionTable& dataset);

/// Throws std::invalid_argument when total is 0, contributing > total or the tiers are invalid.
PrevalenceEstimate prevalence_estimate(std::uint64_t contributing, std::uint64_t total,
                                       const TierFractions& tiers = {});

struct ReportInputs {
    DistributionTable corpus;
    DistributionTable dataset;
    std::vector<std::string> unresolved_doc_ids;
    TierFractions tiers;
};

struct ReportFiles {
    std::filesystem::path text;  // report.txt
    std::filesystem::path csv;   // richness.csv
};

std::string render_report(const ReportInputs& in);
/// Columns: area, corpus_count, corpus_share, dataset_count, dataset_share, coefficient.
std::string render_richness_csv(const ReportInputs& in);
/// Writes both renderings into `destination` (created if missing); throws IoError.
ReportFiles emit_report(const ReportInputs& in, const std::filesystem::path& destination);

}  // namespace explcorpus
