#pragma once

#include "explcorpus/taxonomy.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace explcorpus {

struct DocumentRef {
    std::string doc_id;
    std::filesystem::path path;       // source PDF; may be empty for text-only entries
    std::filesystem::path text_path;  // extracted plain text sidecar
    std::string title;
    std::vector<std::string> authors;
    CategoryTag category_tag = CategoryTag::unknown();
    std::uint64_t char_count = 0;     // code points of the normalized text

    friend bool operator==(const DocumentRef&, const DocumentRef&) = default;
};

/// Immutable once built. Documents are kept sorted by doc_id with no duplicates.
class CorpusManifest {
  public:
    CorpusManifest() = default;
    /// Sorts `documents`; throws std::invalid_argument on a duplicate doc_id.
    explicit CorpusManifest(std::vector<DocumentRef> documents,
                            std::optional<std::int64_t> sample_seed = std::nullopt,
                            std::optional<std::uint64_t> parent_size = std::nullopt);

    const std::vector<DocumentRef>& documents() const noexcept { return documents_; }
    std::size_t size() const noexcept { return documents_.size(); }
    bool empty() const noexcept { return documents_.empty(); }
    std::optional<std::int64_t> sample_seed() const noexcept { return sample_seed_; }
    /// Size of the population this manifest was drawn from (its own size if unsampled).
    std::uint64_t parent_size() const noexcept { return parent_size_; }

    const DocumentRef* find(std::string_view doc_id) const noexcept;

    friend bool operator==(const CorpusManifest&, const CorpusManifest&) = default;

  private:
    std::vector<DocumentRef> documents_;
    std::optional<std::int64_t> sample_seed_;
    std::uint64_t parent_size_ = 0;
};

/// Optional per-document overrides keyed by doc_id. Same record shape as the
/// manifest; every field except doc_id may be omitted.
struct MetadataEntry {
    std::string doc_id;
    std::optional<std::filesystem::path> path;
    std::optional<std::filesystem::path> text_path;
    std::optional<std::string> title;
    std::optional<std::vector<std::string>> authors;
    std::optional<std::string> category_tag;
};

class MetadataIndex {
  public:
    /// Throws FormatError naming the offending line.
    static MetadataIndex load(const std::filesystem::path& path);
    static MetadataIndex parse(std::string_view jsonl, const std::filesystem::path& origin = {});

    const MetadataEntry* find(std::string_view doc_id) const;
    const std::map<std::string, MetadataEntry, std::less<>>& entries() const noexcept { return entries_; }

  private:
    std::map<std::string, MetadataEntry, std::less<>> entries_;
};

struct SkipReport {
    std::string doc_id;
    std::filesystem::path path;
    std::string reason;
};

struct IngestOptions {
    /// Shell command run for PDFs without a text sidecar. "{pdf}" and "{txt}"
    /// are replaced by the quoted input and output paths.
    std::optional<std::string> extract_command;
    unsigned threads = 0;  // 0 = hardware concurrency
};

struct IngestResult {
    CorpusManifest manifest;
    std::vector<SkipReport> skipped;
};

/// Builds a manifest from the PDFs (and metadata-only entries) in `source_dir`.
/// Text comes from `<stem>.txt` next to each PDF unless the metadata names a
/// text_path. Documents without readable text are listed in `skipped`.
IngestResult ingest(const std::filesystem::path& source_dir,
                    const std::optional<std::filesystem::path>& metadata_file = std::nullopt,
                    const IngestOptions& options = {});

/// Draws `n` documents without replacement (seeded Fisher-Yates prefix over the
/// canonical order). Throws std::invalid_argument when n is 0 or exceeds the size.
CorpusManifest sample(const CorpusManifest& manifest, std::size_t n, std::int64_t seed);

/// Normalized text of an ingested document; throws MissingTextError.
std::string load_text(const DocumentRef& ref);

/// First available tag: metadata entry, then embedded PDF metadata, then a tag
/// embedded in the file name. Unknown when nothing resolves.
CategoryTag resolve_category(const DocumentRef& ref, const MetadataIndex* metadata);
CategoryTag resolve_category(const DocumentRef& ref,
                             const std::optional<std::filesystem::path>& metadata_file);

/// Tag pattern such as "math.CO" in a file name, e.g. "math0003117-math.CO.pdf".
std::optional<std::string> category_from_filename(std::string_view filename);

/// Line-delimited manifest: a header object then one document per line.
std::string manifest_to_jsonl(const CorpusManifest& manifest);
CorpusManifest manifest_from_jsonl(std::string_view text, const std::filesystem::path& origin = {});
void save_manifest(const CorpusManifest& manifest, const std::filesystem::path& path);
CorpusManifest load_manifest(const std::filesystem::path& path);

/// SHA-256 of the canonical serialization.
std::string manifest_digest(const CorpusManifest& manifest);

}  // namespace explcorpus
