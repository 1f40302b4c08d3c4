#pragma once

#include "explcorpus/verification.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace explcorpus {

/// Human quality grade. Never assigned by the parser.
enum class QualityLabel { High, Borderline, Low };

std::string_view to_string(QualityLabel label) noexcept;
std::optional<QualityLabel> parse_quality_label(std::string_view text) noexcept;

/// One example reported by the model.
struct ExampleRecord {
    std::string source_doc_id;
    std::string title;
    std::optional<std::string> authors;
    std::string finding;
    std::optional<std::string> quote;
    std::string commentary;
    std::optional<int> page;
    std::uint32_t batch_index = 0;
    std::optional<VerificationResult> verification;
    std::optional<QualityLabel> quality_label;

    friend bool operator==(const ExampleRecord&, const ExampleRecord&) = default;
};

struct Dataset {
    std::vector<ExampleRecord> records;
    std::string source_manifest_hash;
    std::uint32_t filter_pass_count = 0;

    friend bool operator==(const Dataset&, const Dataset&) = default;
};

struct ParseWarning {
    std::uint32_t batch_index = 0;
    std::size_t item = 0;  // 1-based ordinal of the item, 0 for text outside items
    std::size_t line = 0;  // 1-based line in the batch output
    std::string message;
};

struct ParseResult {
    std::vector<ExampleRecord> records;
    std::vector<ParseWarning> warnings;
};

/// Extracts labeled example items (Filename/Title/Authors/Example|Finding/
/// Quote/Context|Commentary/Page) from free-form model output. Tolerates
/// bullets, bold/italic markup, label synonyms and any field order. Never
/// throws; anything it cannot use becomes a warning.
ParseResult parse_batch_output(std::string_view text, std::uint32_t batch_index);

/// Canonical labeled-bullet block for one record (no trailing blank line).
std::string render_record(const ExampleRecord& record);
/// Records separated by blank lines.
std::string render_records(const std::vector<ExampleRecord>& records);

/// Human-readable document grouping records by batch file.
std::string export_document(const Dataset& ds);

struct LoadedDataset {
    Dataset dataset;
    std::vector<std::string> warnings;
};

/// Line-delimited records: one header object then one record per line.
std::string dataset_to_jsonl(const Dataset& ds);
/// Throws FormatError at the first broken line.
LoadedDataset dataset_from_jsonl(std::string_view text, const std::filesystem::path& origin = {},
                                 const std::optional<std::string>& expected_manifest_hash = std::nullopt);
void save_dataset(const Dataset& ds, const std::filesystem::path& path);
LoadedDataset load_dataset(const std::filesystem::path& path,
                           const std::optional<std::string>& expected_manifest_hash = std::nullopt);

/// Drops later records equal to an earlier one in (source_doc_id, quote, finding).
Dataset dedupe(const Dataset& ds);

/// Reduces a model-reported file reference ("papers/math0003117.pdf") to a doc_id.
std::string doc_id_from_filename(std::string_view filename);

}  // namespace explcorpus
