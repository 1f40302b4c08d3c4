#pragma once

#include <explcorpus/corpus.hpp>
#include <explcorpus/records.hpp>
#include <explcorpus/runner.hpp>

#include <cstdint>
#include <filesystem>
#include <map>
#include <random>
#include <string>
#include <vector>

namespace testsupport {

namespace fs = std::filesystem;

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
  public:
    TempDir();
    ~TempDir();
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const fs::path& path() const { return path_; }
    fs::path operator/(const std::string& name) const { return path_ / name; }

  private:
    fs::path path_;
};

void write_file(const fs::path& path, const std::string& content);
std::string read_file(const fs::path& path);

fs::path golden_dir();
fs::path source_dir();
/// Compares `actual` with golden/<name>; rewrites it when EXPLCORPUS_UPDATE_GOLDEN is set.
bool matches_golden(const std::string& name, const std::string& actual, std::string* golden_out = nullptr);

/// Small deterministic generator for property tests.
class Gen {
  public:
    explicit Gen(std::uint64_t seed) : rng_(seed) {}

    std::uint64_t below(std::uint64_t n);  // uniform in [0, n)
    std::int64_t between(std::int64_t lo, std::int64_t hi);  // inclusive
    bool chance(double p);
    std::string word();
    std::string sentence(int min_words = 4, int max_words = 14);
    std::string paragraph(int sentences);
    /// Printable ASCII mixed with multi-byte characters, tabs and newlines.
    std::string messy_text(std::size_t max_len);
    std::u32string letters(std::size_t len, std::u32string_view alphabet);
    std::mt19937_64& engine() { return rng_; }

  private:
    std::mt19937_64 rng_;
};

/// Levenshtein distance by the full dynamic-programming table.
std::size_t reference_distance(const std::u32string& a, const std::u32string& b);
/// Best 1 - d/max(|q|, |w|) over every window w of length floor(0.8|q|)..ceil(1.2|q|).
double reference_similarity(const std::u32string& quote, const std::u32string& doc);

/// Manifest of `n` documents with ids doc00000.. and the given char count; no files.
explcorpus::CorpusManifest synthetic_manifest(std::size_t n, std::uint64_t char_count = 1000);

/// Writes `<id>.pdf` (a minimal PDF carrying /Title and /Subject) plus `<id>.txt`.
void write_paper(const fs::path& dir, const std::string& id, const std::string& title, const std::string& tag,
                 const std::string& text);

/// Record satisfying the render/parse round-trip (single-line fields unless `multiline`).
explcorpus::ExampleRecord random_record(Gen& g, bool multiline = false);
/// Arbitrary record for persistence tests, including verification and labels.
explcorpus::ExampleRecord random_stored_record(Gen& g);

/// Documents p00000.. with real sidecars; tags cycle over a few subject areas.
struct OfflineCorpus {
    explcorpus::CorpusManifest manifest;
    std::map<std::string, std::string> texts;  // normalized
};
OfflineCorpus write_offline_corpus(const fs::path& dir, std::size_t n, Gen& g);

/// Stub fixtures for `plan`: every batch reports `per_batch` examples quoting
/// its first document, and the filter keeps the first `keep` of them.
/// Returns the number of annotation records written.
std::size_t write_stub_fixtures(const fs::path& fixtures, const OfflineCorpus& corpus,
                                const explcorpus::BatchPlan& plan, std::size_t per_batch, std::size_t keep);

/// Twenty canonical records; the first five re-type worked examples from the literature.
const std::vector<explcorpus::ExampleRecord>& canonical_records();

}  // namespace testsupport
