#pragma once

#include "explcorpus/corpus.hpp"
#include "explcorpus/prompts.hpp"
#include "explcorpus/provider.hpp"
#include "explcorpus/records.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace explcorpus {

enum class JobStatus { Pending, Done, Failed };

std::string_view to_string(JobStatus s) noexcept;

struct BatchJob {
    std::uint32_t index = 0;
    std::vector<std::string> doc_ids;
    JobStatus status = JobStatus::Pending;
    std::filesystem::path output_path;
    std::string error;  // set when Failed
};

struct RunnerConfig {
    std::size_t batch_size = 25;
    std::filesystem::path output_dir = ".";
    bool resume = false;
    /// Exclude (with a warning) documents that cannot fit the window alone.
    bool skip_oversize = false;
    unsigned filter_passes = 1;
};

/// Window arithmetic used when sizing batches.
struct BatchBudget {
    std::uint64_t context_window_tokens = 0;
    std::uint64_t max_output_tokens = 0;
    std::uint64_t prompt_chars = 0;  // code points of the assembled prompt

    static BatchBudget for_prompt(const ProviderConfig& provider, const PromptBundle& bundle);
    /// Estimated tokens of a full request carrying `payload_chars` of payload.
    std::uint64_t request_tokens(std::uint64_t payload_chars) const;
    bool fits(std::uint64_t payload_chars) const;
};

struct BatchPlan {
    std::vector<BatchJob> jobs;
    std::vector<std::string> excluded_doc_ids;
    std::vector<std::string> warnings;
};

/// Header line preceding each document in a batch payload.
std::string batch_document_header(const DocumentRef& ref);
/// Code points of the payload for `docs` (computed from manifest char counts).
std::uint64_t batch_payload_chars(const std::vector<const DocumentRef*>& docs);
/// Concatenates normalized texts, each preceded by its header line.
std::string build_batch_payload(const std::vector<const DocumentRef*>& docs, const std::vector<std::string>& texts);

std::filesystem::path batch_output_path(const std::filesystem::path& dir, std::uint32_t index);
std::filesystem::path batch_filtered_path(const std::filesystem::path& dir, std::uint32_t index);

/// Consecutive batches of at most batch_size documents in canonical order.
/// With a budget, a batch that would overflow the window is halved until it
/// fits; a document too large on its own throws OversizeDocument unless
/// cfg.skip_oversize. Throws std::invalid_argument for an empty manifest.
BatchPlan plan_batches(const CorpusManifest& manifest, const RunnerConfig& cfg,
                       const std::optional<BatchBudget>& budget = std::nullopt);

struct Checkpoint {
    std::string manifest_hash;
    std::size_t batch_size = 0;
    std::size_t planned = 0;
    std::set<std::uint32_t> completed_indices;

    friend bool operator==(const Checkpoint&, const Checkpoint&) = default;
};

std::filesystem::path checkpoint_path(const std::filesystem::path& dir);
std::optional<Checkpoint> load_checkpoint(const std::filesystem::path& dir);
/// Write-temp-then-rename.
void save_checkpoint(const std::filesystem::path& dir, const Checkpoint& cp);

struct JobFailure {
    std::uint32_t index = 0;
    std::string message;
};

struct RunSummary {
    std::vector<BatchJob> jobs;
    std::size_t done = 0;
    std::size_t failed = 0;
    std::size_t skipped = 0;  // already Done on resume
    std::uint64_t provider_calls = 0;
    std::vector<JobFailure> failures;

    bool partial_failure() const noexcept { return failed > 0; }
};

/// Test seam: called after a batch output is on disk and before the checkpoint records it.
struct RunHooks {
    std::function<void(std::uint32_t index)> after_output_written;
};

/// Runs every Pending job: payload -> provider -> batch_{n}_output.txt ->
/// checkpoint. A failing job is recorded and the others continue; AuthError
/// aborts the run. Throws CheckpointMismatch when resuming against a
/// checkpoint written for a different manifest or batch size.
RunSummary run_annotation(std::vector<BatchJob> jobs, const PromptBundle& bundle, const CorpusManifest& manifest,
                          ChatClient& client, const RunnerConfig& cfg, const RunHooks& hooks = {});

struct FilterBatchStat {
    std::uint32_t index = 0;
    std::size_t input_count = 0;
    std::size_t retained_count = 0;
    std::filesystem::path output_path;

    double retention() const noexcept;
};

struct FilterSummary {
    std::vector<FilterBatchStat> batches;
    std::vector<std::filesystem::path> skipped_empty;
    std::vector<JobFailure> failures;
    std::size_t input_count = 0;
    std::size_t retained_count = 0;
    unsigned passes = 0;
    std::uint64_t provider_calls = 0;
    /// Fewer than half of the input examples were excluded.
    bool quota_warning = false;

    std::optional<double> retention() const noexcept;
};

/// Indices of batch_{n}_output.txt files in `dir`, ascending.
std::vector<std::uint32_t> find_batch_outputs(const std::filesystem::path& dir);

/// Applies the strict filter prompt to each batch output and writes
/// batch_{n}_filtered.txt. Throws IoError when no batch outputs exist.
FilterSummary run_filter(const std::filesystem::path& output_dir, ChatClient& client, const RunnerConfig& cfg,
                         const TemplateOverrides& overrides = {});

/// Number of filter passes recorded for `dir` (0 when never filtered).
unsigned recorded_filter_passes(const std::filesystem::path& dir);

struct QueryResult {
    std::string answer;
    std::filesystem::path log_path;
    std::size_t transcript_entries = 0;
};

/// Sends the dataset (rendered records for .jsonl datasets, raw text
/// otherwise) with the query framing and `question`; appends the exchange to
/// `log_path` (default: `<dataset>.queries.jsonl`). Throws ContextOverflow with
/// sharding guidance when the dataset does not fit.
QueryResult run_query(const std::filesystem::path& dataset_path, std::string_view question, ChatClient& client,
                      const std::optional<std::filesystem::path>& log_path = std::nullopt,
                      const TemplateOverrides& overrides = {});

struct ParsedOutputs {
    Dataset dataset;
    std::vector<ParseWarning> warnings;
};

/// Parses every batch_{n}_filtered.txt (or _output.txt when `filtered` is
/// false) in `dir` into one dataset.
ParsedOutputs parse_outputs(const std::filesystem::path& dir, bool filtered, std::string manifest_hash = {});

}  // namespace explcorpus
