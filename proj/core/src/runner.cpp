#include "explcorpus/runner.hpp"

#include "explcorpus/error.hpp"
#include "explcorpus/tokens.hpp"

#include "detail/fs_util.hpp"
#include "detail/parallel.hpp"
#include "detail/utf8.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <ctime>
#include <mutex>
#include <stdexcept>

namespace explcorpus {

namespace fs = std::filesystem;

std::string_view to_string(JobStatus s) noexcept {
    switch (s) {
        case JobStatus::Pending: return "pending";
        case JobStatus::Done: return "done";
        case JobStatus::Failed: return "failed";
    }
    return "pending";
}

BatchBudget BatchBudget::for_prompt(const ProviderConfig& provider, const PromptBundle& bundle) {
    return {provider.context_window_tokens, provider.max_output_tokens, detail::codepoint_count(bundle.text())};
}

std::uint64_t BatchBudget::request_tokens(std::uint64_t payload_chars) const {
    // "\n\n" joins prompt and payload in a combined message.
    const std::uint64_t sep = (prompt_chars > 0 && payload_chars > 0) ? 2 : 0;
    return estimate_tokens_for_chars(prompt_chars + sep + payload_chars) + max_output_tokens;
}

bool BatchBudget::fits(std::uint64_t payload_chars) const {
    return request_tokens(payload_chars) <= context_window_tokens;
}

std::string batch_document_header(const DocumentRef& ref) {
    if (ref.title.empty()) return "=== FILE: " + ref.doc_id + " ===";
    return "=== FILE: " + ref.doc_id + " (" + ref.title + ") ===";
}

std::uint64_t batch_payload_chars(const std::vector<const DocumentRef*>& docs) {
    std::uint64_t n = 0;
    for (std::size_t i = 0; i < docs.size(); ++i) {
        if (i > 0) n += 2;
        n += detail::codepoint_count(batch_document_header(*docs[i])) + 1 + docs[i]->char_count;
    }
    return n;
}

std::string build_batch_payload(const std::vector<const DocumentRef*>& docs, const std::vector<std::string>& texts) {
    if (docs.size() != texts.size()) throw std::invalid_argument("documents and texts differ in length");
    std::string out;
    for (std::size_t i = 0; i < docs.size(); ++i) {
        if (i > 0) out += "\n\n";
        out += batch_document_header(*docs[i]);
        out += '\n';
        out += texts[i];
    }
    return out;
}

fs::path batch_output_path(const fs::path& dir, std::uint32_t index) {
    return dir / ("batch_" + std::to_string(index) + "_output.txt");
}

fs::path batch_filtered_path(const fs::path& dir, std::uint32_t index) {
    return dir / ("batch_" + std::to_string(index) + "_filtered.txt");
}

namespace {

void place(std::vector<const DocumentRef*> docs, const RunnerConfig& cfg, const BatchBudget& budget,
           std::vector<std::vector<const DocumentRef*>>& out, BatchPlan& plan) {
    if (docs.empty()) return;
    if (budget.fits(batch_payload_chars(docs))) {
        out.push_back(std::move(docs));
        return;
    }
    if (docs.size() == 1) {
        const auto* d = docs.front();
        const auto need = budget.request_tokens(batch_payload_chars(docs));
        if (!cfg.skip_oversize) throw OversizeDocument(d->doc_id, need, budget.context_window_tokens);
        plan.excluded_doc_ids.push_back(d->doc_id);
        plan.warnings.push_back("excluded " + d->doc_id + ": needs " + std::to_string(need) +
                                " tokens, window is " + std::to_string(budget.context_window_tokens));
        return;
    }
    const auto mid = docs.begin() + static_cast<std::ptrdiff_t>(docs.size() / 2);
    place({docs.begin(), mid}, cfg, budget, out, plan);
    place({mid, docs.end()}, cfg, budget, out, plan);
}

}  // namespace

BatchPlan plan_batches(const CorpusManifest& manifest, const RunnerConfig& cfg,
                       const std::optional<BatchBudget>& budget) {
    if (manifest.empty()) throw std::invalid_argument("manifest has no documents");
    if (cfg.batch_size == 0) throw std::invalid_argument("batch size must be positive");

    BatchPlan plan;
    std::vector<std::vector<const DocumentRef*>> groups;
    const auto& docs = manifest.documents();
    for (std::size_t start = 0; start < docs.size(); start += cfg.batch_size) {
        std::vector<const DocumentRef*> chunk;
        for (std::size_t i = start; i < std::min(docs.size(), start + cfg.batch_size); ++i) chunk.push_back(&docs[i]);
        if (budget) {
            place(std::move(chunk), cfg, *budget, groups, plan);
        } else {
            groups.push_back(std::move(chunk));
        }
    }
    for (auto& g : groups) {
        BatchJob job;
        job.index = static_cast<std::uint32_t>(plan.jobs.size());
        for (const auto* d : g) job.doc_ids.push_back(d->doc_id);
        job.output_path = batch_output_path(cfg.output_dir, job.index);
        plan.jobs.push_back(std::move(job));
    }
    return plan;
}

RunSummary run_annotation(std::vector<BatchJob> jobs, const PromptBundle& bundle, const CorpusManifest& manifest,
                          ChatClient& client, const RunnerConfig& cfg, const RunHooks& hooks) {
    fs::create_directories(cfg.output_dir);
    const auto hash = manifest_digest(manifest);

    Checkpoint cp{hash, cfg.batch_size, jobs.size(), {}};
    if (cfg.resume) {
        if (auto existing = load_checkpoint(cfg.output_dir)) {
            if (existing->manifest_hash != hash) {
                throw CheckpointMismatch("checkpoint in " + cfg.output_dir.string() +
                                         " was written for a different manifest");
            }
            if (existing->batch_size != cfg.batch_size || existing->planned != jobs.size()) {
                throw CheckpointMismatch("checkpoint in " + cfg.output_dir.string() +
                                         " was written for a different batch plan");
            }
            cp.completed_indices = existing->completed_indices;
        }
    }

    RunSummary summary;
    std::vector<std::size_t> pending;
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        auto& job = jobs[i];
        if (job.output_path.empty()) job.output_path = batch_output_path(cfg.output_dir, job.index);
        std::error_code ec;
        if (cp.completed_indices.count(job.index) && fs::file_size(job.output_path, ec) > 0 && !ec) {
            job.status = JobStatus::Done;
            ++summary.skipped;
        } else {
            cp.completed_indices.erase(job.index);
            job.status = JobStatus::Pending;
            pending.push_back(i);
        }
    }
    save_checkpoint(cfg.output_dir, cp);

    const auto calls_before = client.calls();
    std::mutex mutex;
    detail::parallel_for(pending.size(), std::max(1u, client.config().max_inflight), [&](std::size_t k) {
        auto& job = jobs[pending[k]];
        try {
            std::vector<const DocumentRef*> docs;
            std::vector<std::string> texts;
            for (const auto& id : job.doc_ids) {
                const auto* ref = manifest.find(id);
                if (!ref) throw Error("document " + id + " is not in the manifest");
                docs.push_back(ref);
                texts.push_back(load_text(*ref));
            }
            auto request = bundle;
            request.payload_refs = job.doc_ids;
            auto response = client.complete(request, build_batch_payload(docs, texts));
            if (response.text.find_first_not_of(" \t\r\n") == std::string::npos) {
                throw ProviderError("empty response");
            }
            detail::write_file_atomic(job.output_path, response.text);
            if (hooks.after_output_written) hooks.after_output_written(job.index);
            std::lock_guard lock(mutex);
            cp.completed_indices.insert(job.index);
            save_checkpoint(cfg.output_dir, cp);
            job.status = JobStatus::Done;
        } catch (const AuthError&) {
            throw;
        } catch (const Error& e) {
            std::lock_guard lock(mutex);
            job.status = JobStatus::Failed;
            job.error = e.what();
        }
    });

    for (const auto& job : jobs) {
        if (job.status == JobStatus::Failed) {
            ++summary.failed;
            summary.failures.push_back({job.index, job.error});
        } else if (job.status == JobStatus::Done) {
            ++summary.done;
        }
    }
    summary.done -= summary.skipped;
    summary.provider_calls = client.calls() - calls_before;
    summary.jobs = std::move(jobs);
    return summary;
}

double FilterBatchStat::retention() const noexcept {
    return input_count == 0 ? 0.0 : static_cast<double>(retained_count) / static_cast<double>(input_count);
}

std::optional<double> FilterSummary::retention() const noexcept {
    if (input_count == 0) return std::nullopt;
    return static_cast<double>(retained_count) / static_cast<double>(input_count);
}

namespace {

std::vector<std::uint32_t> find_batches(const fs::path& dir, std::string_view suffix) {
    std::vector<std::uint32_t> out;
    std::error_code ec;
    if (!fs::is_directory(dir, ec)) return out;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        const auto name = entry.path().filename().string();
        constexpr std::string_view prefix = "batch_";
        if (name.size() <= prefix.size() + suffix.size() || name.compare(0, prefix.size(), prefix) != 0 ||
            name.compare(name.size() - suffix.size(), suffix.size(), suffix) != 0) {
            continue;
        }
        const auto digits = std::string_view(name).substr(prefix.size(), name.size() - prefix.size() - suffix.size());
        std::uint32_t n = 0;
        auto [p, err] = std::from_chars(digits.data(), digits.data() + digits.size(), n);
        if (err == std::errc() && p == digits.data() + digits.size()) out.push_back(n);
    }
    std::sort(out.begin(), out.end());
    return out;
}

fs::path filter_state_path(const fs::path& dir) { return dir / "filter_state.json"; }

bool blank(std::string_view s) { return s.find_first_not_of(" \t\r\n") == std::string_view::npos; }

}  // namespace

std::vector<std::uint32_t> find_batch_outputs(const fs::path& dir) { return find_batches(dir, "_output.txt"); }

FilterSummary run_filter(const fs::path& output_dir, ChatClient& client, const RunnerConfig& cfg,
                         const TemplateOverrides& overrides) {
    const auto indices = find_batch_outputs(output_dir);
    if (indices.empty()) throw IoError(output_dir, "no batch outputs to filter");

    FilterSummary summary;
    summary.passes = std::max(1u, cfg.filter_passes);
    const auto calls_before = client.calls();

    struct Slot {
        std::optional<FilterBatchStat> stat;
        std::optional<fs::path> skipped;
        std::optional<JobFailure> failure;
    };
    std::vector<Slot> slots(indices.size());

    detail::parallel_for(indices.size(), std::max(1u, client.config().max_inflight), [&](std::size_t k) {
        const auto index = indices[k];
        const auto source = batch_output_path(output_dir, index);
        auto& slot = slots[k];
        try {
            auto current = detail::read_file(source);
            if (blank(current)) {
                slot.skipped = source;
                return;
            }
            const auto input = parse_batch_output(current, index).records.size();
            const auto target = batch_filtered_path(output_dir, index);
            for (unsigned pass = 0; pass < summary.passes; ++pass) {
                const auto ref = (pass == 0 ? source : target).filename().string();
                auto bundle = build_filter_prompt(current, {ref}, overrides);
                auto response = client.complete(bundle);
                if (blank(response.text)) throw ProviderError("empty response");
                current = std::move(response.text);
                detail::write_file_atomic(target, current);
            }
            slot.stat = FilterBatchStat{index, input, parse_batch_output(current, index).records.size(), target};
        } catch (const AuthError&) {
            throw;
        } catch (const Error& e) {
            slot.failure = JobFailure{index, e.what()};
        }
    });

    for (auto& s : slots) {
        if (s.skipped) summary.skipped_empty.push_back(*s.skipped);
        if (s.failure) summary.failures.push_back(*s.failure);
        if (s.stat) {
            summary.input_count += s.stat->input_count;
            summary.retained_count += s.stat->retained_count;
            summary.batches.push_back(std::move(*s.stat));
        }
    }
    auto r = summary.retention();
    summary.quota_warning = r && *r > 0.5;
    summary.provider_calls = client.calls() - calls_before;

    nlohmann::ordered_json state;
    state["filter_pass_count"] = summary.passes;
    detail::write_file_atomic(filter_state_path(output_dir), state.dump() + "\n");
    return summary;
}

unsigned recorded_filter_passes(const fs::path& dir) {
    const auto path = filter_state_path(dir);
    std::error_code ec;
    if (!fs::exists(path, ec)) return 0;
    try {
        return nlohmann::json::parse(detail::read_file(path)).at("filter_pass_count").get<unsigned>();
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(path, 1, e.what());
    }
}

namespace {

std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

bool is_jsonl(const fs::path& p) { return p.extension() == ".jsonl"; }

}  // namespace

QueryResult run_query(const fs::path& dataset_path, std::string_view question, ChatClient& client,
                      const std::optional<fs::path>& log_path, const TemplateOverrides& overrides) {
    auto bundle = build_query_prompt(dataset_path, question, overrides);
    std::string payload =
        is_jsonl(dataset_path) ? render_records(load_dataset(dataset_path).dataset.records) : detail::read_file(dataset_path);

    const auto required = client.required_tokens(bundle, payload);
    if (required > client.config().context_window_tokens) {
        throw ContextOverflow(required, client.config().context_window_tokens,
                              "shard the dataset and query each shard separately");
    }
    auto response = client.complete(bundle, payload);

    QueryResult result;
    result.answer = response.text;
    result.log_path = log_path ? *log_path : fs::path(dataset_path.string() + ".queries.jsonl");

    nlohmann::ordered_json entry;
    entry["timestamp"] = utc_timestamp();
    entry["dataset"] = dataset_path.string();
    entry["question"] = std::string(question);
    entry["answer"] = response.text;
    entry["input_tokens"] = response.input_tokens;
    entry["output_tokens"] = response.output_tokens;
    detail::append_file(result.log_path, entry.dump() + "\n");

    const auto log = detail::read_file(result.log_path);
    result.transcript_entries = static_cast<std::size_t>(std::count(log.begin(), log.end(), '\n'));
    return result;
}

ParsedOutputs parse_outputs(const fs::path& dir, bool filtered, std::string manifest_hash) {
    const auto indices = find_batches(dir, filtered ? "_filtered.txt" : "_output.txt");
    if (indices.empty()) {
        throw IoError(dir, filtered ? "no filtered batch outputs" : "no batch outputs");
    }
    ParsedOutputs out;
    for (auto index : indices) {
        const auto path = filtered ? batch_filtered_path(dir, index) : batch_output_path(dir, index);
        auto parsed = parse_batch_output(detail::read_file(path), index);
        for (auto& r : parsed.records) out.dataset.records.push_back(std::move(r));
        for (auto& w : parsed.warnings) out.warnings.push_back(std::move(w));
    }
    if (manifest_hash.empty()) {
        if (auto cp = load_checkpoint(dir)) manifest_hash = cp->manifest_hash;
    }
    out.dataset.source_manifest_hash = std::move(manifest_hash);
    out.dataset.filter_pass_count = filtered ? recorded_filter_passes(dir) : 0;
    return out;
}

}  // namespace explcorpus
