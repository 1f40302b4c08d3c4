#include "explcorpus/cli.hpp"

#include <explcorpus/corpus.hpp>
#include <explcorpus/error.hpp>
#include <explcorpus/records.hpp>
#include <explcorpus/tokens.hpp>

#include <CLI11.hpp>
#include <json.hpp>
#include <spdlog/logger.h>
#include <spdlog/sinks/ostream_sink.h>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

namespace explcorpus::cli {

namespace fs = std::filesystem;

Environment Environment::process() {
    Environment e;
    e.out = &std::cout;
    e.err = &std::cerr;
    e.getenv = [](const std::string& name) -> std::optional<std::string> {
        if (const char* v = std::getenv(name.c_str())) return std::string(v);
        return std::nullopt;
    };
    return e;
}

namespace {

class UserError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct ProviderFlags {
    std::optional<std::string> dialect;
    std::optional<std::string> model;
    std::optional<std::string> base_url;
    std::optional<std::string> api_key_env;
    std::optional<std::string> fixtures;
    std::optional<std::uint64_t> context_window;
    std::optional<std::uint64_t> max_output;
    std::optional<int> max_retries;
    std::optional<unsigned> max_inflight;
    std::optional<double> temperature;
    std::optional<std::uint32_t> timeout;
    std::optional<std::string> audit_log;
    bool system_message = false;

    void attach(CLI::App* app) {
        app->add_option("--provider", dialect, "Provider dialect: gemini, openai or stub");
        app->add_option("--model", model, "Model name");
        app->add_option("--base-url", base_url, "API base URL");
        app->add_option("--api-key-env", api_key_env, "Environment variable holding the API key");
        app->add_option("--fixtures", fixtures, "Stub provider fixture directory");
        app->add_option("--context-window", context_window, "Context window in tokens");
        app->add_option("--max-output", max_output, "Maximum output tokens per request");
        app->add_option("--max-retries", max_retries, "Retries after a transient failure");
        app->add_option("--max-inflight", max_inflight, "Concurrent provider requests");
        app->add_option("--temperature", temperature, "Sampling temperature");
        app->add_option("--timeout", timeout, "Per-request timeout in seconds");
        app->add_option("--audit-log", audit_log, "Append redacted request/response pairs to this file");
        app->add_flag("--system-message", system_message, "Send the prompt as a system message");
    }

    void apply(ProviderConfig& pc) const {
        if (dialect) {
            auto d = parse_dialect(*dialect);
            if (!d) throw UserError("unknown provider '" + *dialect + "'");
            pc.dialect = *d;
        }
        if (model) pc.model_name = *model;
        if (base_url) pc.base_url = *base_url;
        if (api_key_env) pc.api_key_env = *api_key_env;
        if (fixtures) pc.fixtures_dir = *fixtures;
        if (context_window) pc.context_window_tokens = *context_window;
        if (max_output) pc.max_output_tokens = *max_output;
        if (max_retries) pc.max_retries = *max_retries;
        if (max_inflight) pc.max_inflight = *max_inflight;
        if (temperature) pc.temperature = *temperature;
        if (timeout) pc.timeout_s = *timeout;
        if (audit_log) pc.audit_log = fs::path(*audit_log);
        if (system_message) pc.system_message = true;
    }
};

struct Options {
    std::optional<std::string> config;
    std::optional<std::string> prompts_dir;
    ProviderFlags provider;

    // ingest
    std::string source;
    std::optional<std::string> metadata;
    std::optional<std::string> extract_command;
    unsigned threads = 0;
    // shared paths
    std::string manifest;
    std::string out;
    std::string dataset;
    std::optional<std::string> out_opt;
    std::string dir;
    // sample
    std::size_t n = 0;
    std::int64_t seed = 0;
    // annotate / filter
    std::optional<std::size_t> batch_size;
    std::optional<unsigned> passes;
    bool resume = false;
    bool skip_oversize = false;
    bool dry_run = false;
    std::optional<std::string> context;
    std::string context_description;
    // parse
    bool raw = false;
    bool dedupe_records = false;
    std::optional<std::string> manifest_opt;
    // verify
    std::optional<double> threshold;
    std::optional<std::string> summary_json;
    // stats
    std::optional<std::string> tiers;
    std::optional<std::string> taxonomy;
    // query
    std::string question;
    std::optional<std::string> log;
    // prompts
    std::string kind = "annotation";
    std::optional<std::string> batch;
};

struct Context {
    Environment& env;
    Options& o;
    spdlog::logger& log;
    std::ostream& out() { return *env.out; }
};

GlobalConfig resolve_config(Context& c) {
    std::optional<fs::path> path;
    if (c.o.config) {
        path = *c.o.config;
    } else if (c.env.getenv) {
        if (auto v = c.env.getenv(kConfigEnvVar); v && !v->empty()) path = *v;
    }
    GlobalConfig cfg = path ? GlobalConfig::load(*path) : GlobalConfig{};
    if (path) c.log.info("config {}", path->string());
    c.o.provider.apply(cfg.provider);
    if (c.o.prompts_dir) cfg.prompts_dir = *c.o.prompts_dir;
    if (c.o.batch_size) cfg.runner.batch_size = *c.o.batch_size;
    if (c.o.passes) cfg.runner.filter_passes = *c.o.passes;
    if (c.o.resume) cfg.runner.resume = true;
    if (c.o.skip_oversize) cfg.runner.skip_oversize = true;
    if (c.o.threshold) cfg.threshold = *c.o.threshold;
    if (c.o.tiers) cfg.tiers = TierFractions::parse(*c.o.tiers);
    if (c.o.taxonomy) cfg.taxonomy = *c.o.taxonomy;
    return cfg;
}

TemplateOverrides overrides_for(const GlobalConfig& cfg) {
    if (cfg.prompts_dir.empty()) return {};
    if (!fs::is_directory(cfg.prompts_dir)) throw IoError(cfg.prompts_dir, "prompts directory not found");
    return TemplateOverrides::from_directory(cfg.prompts_dir);
}

ChatClient make_client(Context& c, const GlobalConfig& cfg) {
    auto transport = c.env.transport ? c.env.transport : make_transport(cfg.provider);
    c.log.info("provider {} model {}", to_string(cfg.provider.dialect), cfg.provider.model_name);
    return ChatClient(cfg.provider, std::move(transport), c.env.sleeper);
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f || !(f << text) || !f.flush()) throw IoError(path, "cannot write");
}

int cmd_ingest(Context& c) {
    IngestOptions opts;
    opts.extract_command = c.o.extract_command;
    opts.threads = c.o.threads;
    std::optional<fs::path> metadata;
    if (c.o.metadata) metadata = *c.o.metadata;
    auto result = ingest(c.o.source, metadata, opts);
    for (const auto& s : result.skipped) c.log.warn("skipped {} ({}): {}", s.doc_id, s.path.string(), s.reason);
    save_manifest(result.manifest, c.o.out);
    c.out() << "ingested " << result.manifest.size() << " documents, skipped " << result.skipped.size() << "\n";
    return kOk;
}

int cmd_sample(Context& c) {
    auto m = load_manifest(c.o.manifest);
    auto s = sample(m, c.o.n, c.o.seed);
    save_manifest(s, c.o.out);
    c.out() << "sampled " << s.size() << " of " << m.size() << " documents (seed " << c.o.seed << ")\n";
    return kOk;
}

int cmd_annotate(Context& c) {
    auto cfg = resolve_config(c);
    if (!c.o.out.empty()) cfg.runner.output_dir = c.o.out;
    auto manifest = load_manifest(c.o.manifest);
    std::optional<ContextAsset> asset;
    if (c.o.context) asset = ContextAsset::from_file(*c.o.context, c.o.context_description);
    auto bundle = build_annotation_prompt(asset, overrides_for(cfg));
    const auto budget = BatchBudget::for_prompt(cfg.provider, bundle);
    auto plan = plan_batches(manifest, cfg.runner, budget);
    for (const auto& w : plan.warnings) c.log.warn("{}", w);

    if (c.o.dry_run) {
        std::uint64_t total = 0;
        for (const auto& job : plan.jobs) {
            std::vector<const DocumentRef*> docs;
            for (const auto& id : job.doc_ids) docs.push_back(manifest.find(id));
            const auto chars = batch_payload_chars(docs);
            const auto tokens = budget.request_tokens(chars);
            total += tokens;
            c.out() << "batch " << job.index << ": " << job.doc_ids.size() << " documents, " << chars
                    << " payload chars, ~" << tokens << " tokens -> " << job.output_path.string() << "\n";
        }
        c.out() << plan.jobs.size() << " batches, ~" << total << " tokens, window " << budget.context_window_tokens
                << "\n";
        return kOk;
    }

    auto client = make_client(c, cfg);
    auto summary = run_annotation(plan.jobs, bundle, manifest, client, cfg.runner);
    for (const auto& f : summary.failures) c.log.error("batch {} failed: {}", f.index, f.message);
    c.out() << "batches done " << summary.done << ", resumed " << summary.skipped << ", failed " << summary.failed
            << ", provider calls " << summary.provider_calls << "\n";
    return summary.partial_failure() ? kPartialFailure : kOk;
}

int cmd_filter(Context& c) {
    auto cfg = resolve_config(c);
    auto overrides = overrides_for(cfg);
    if (c.o.dry_run) {
        const auto indices = find_batch_outputs(c.o.dir);
        if (indices.empty()) throw IoError(c.o.dir, "no batch outputs to filter");
        for (auto i : indices) {
            const auto path = batch_output_path(c.o.dir, i);
            std::ifstream f(path, std::ios::binary);
            std::stringstream s;
            s << f.rdbuf();
            if (s.str().find_first_not_of(" \t\r\n") == std::string::npos) {
                c.out() << "batch " << i << ": empty, skipped\n";
                continue;
            }
            auto bundle = build_filter_prompt(s.str(), {path.filename().string()}, overrides);
            c.out() << "batch " << i << ": ~" << bundle.estimated_tokens + cfg.provider.max_output_tokens
                    << " tokens per pass, " << std::max(1u, cfg.runner.filter_passes) << " pass(es)\n";
        }
        return kOk;
    }
    auto client = make_client(c, cfg);
    auto summary = run_filter(c.o.dir, client, cfg.runner, overrides);
    for (const auto& p : summary.skipped_empty) c.log.warn("skipped empty batch output {}", p.string());
    for (const auto& f : summary.failures) c.log.error("batch {} failed: {}", f.index, f.message);
    for (const auto& b : summary.batches) {
        c.out() << "batch " << b.index << ": kept " << b.retained_count << " of " << b.input_count << "\n";
    }
    if (auto r = summary.retention()) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.2f", *r);
        c.out() << "retention " << buf << " (" << summary.retained_count << " of " << summary.input_count << ")\n";
    }
    if (summary.quota_warning) c.log.warn("filter kept more than half of the examples");
    return summary.failures.empty() ? kOk : kPartialFailure;
}

int cmd_parse(Context& c) {
    std::string hash;
    if (c.o.manifest_opt) hash = manifest_digest(load_manifest(*c.o.manifest_opt));
    auto parsed = parse_outputs(c.o.dir, !c.o.raw, hash);
    for (const auto& w : parsed.warnings) {
        c.log.warn("batch {} item {} line {}: {}", w.batch_index, w.item, w.line, w.message);
    }
    auto ds = c.o.dedupe_records ? dedupe(parsed.dataset) : parsed.dataset;
    save_dataset(ds, c.o.out);
    c.out() << "parsed " << ds.records.size() << " records, " << parsed.warnings.size() << " warnings\n";
    return kOk;
}

int cmd_verify(Context& c) {
    auto cfg = resolve_config(c);
    if (!(cfg.threshold > 0.0 && cfg.threshold <= 1.0)) throw UserError("threshold must lie in (0, 1]");
    auto manifest = load_manifest(c.o.manifest);
    auto loaded = load_dataset(c.o.dataset, manifest_digest(manifest));
    for (const auto& w : loaded.warnings) c.log.warn("{}", w);
    auto result = verify_dataset(loaded.dataset, manifest, cfg.threshold, c.o.threads);
    const fs::path out = c.o.out_opt ? fs::path(*c.o.out_opt) : fs::path(c.o.dataset);
    save_dataset(result.dataset, out);

    const auto& s = result.summary;
    char line[128];
    std::snprintf(line, sizeof line, "threshold %.2f\n", cfg.threshold);
    c.out() << line;
    c.out() << "verified    " << s.verified << "\nunverified  " << s.unverified << "\nno quote    " << s.no_quote
            << "\nskipped     " << s.skipped << "\nfor review  " << s.review_records.size() << "\n";
    for (std::size_t i = 0; i < s.skipped_records.size(); ++i) {
        c.log.warn("record {} skipped: {}", s.skipped_records[i], s.skip_reasons[i]);
    }
    if (c.o.summary_json) {
        nlohmann::ordered_json j;
        j["threshold"] = cfg.threshold;
        j["verified"] = s.verified;
        j["unverified"] = s.unverified;
        j["no_quote"] = s.no_quote;
        j["skipped"] = s.skipped;
        j["unverified_records"] = s.unverified_records;
        j["review_records"] = s.review_records;
        j["skipped_records"] = s.skipped_records;
        j["skip_reasons"] = s.skip_reasons;
        write_text(*c.o.summary_json, j.dump(2) + "\n");
    }
    return kOk;
}

int cmd_stats(Context& c) {
    auto cfg = resolve_config(c);
    auto manifest = load_manifest(c.o.manifest);
    auto loaded = load_dataset(c.o.dataset);
    for (const auto& w : loaded.warnings) c.log.warn("{}", w);
    auto taxonomy = cfg.taxonomy.empty() ? Taxonomy::builtin() : Taxonomy::load(cfg.taxonomy);
    ReportInputs in;
    in.corpus = corpus_distribution(manifest, taxonomy);
    auto dd = dataset_distribution(loaded.dataset, manifest, taxonomy);
    in.dataset = dd.table;
    in.unresolved_doc_ids = dd.unresolved_doc_ids;
    in.tiers = cfg.tiers;
    for (const auto& id : dd.unresolved_doc_ids) c.log.warn("source {} not in manifest; excluded", id);
    auto files = emit_report(in, c.o.out);
    c.out() << render_report(in);
    c.log.info("wrote {} and {}", files.text.string(), files.csv.string());
    return kOk;
}

int cmd_query(Context& c) {
    auto cfg = resolve_config(c);
    auto overrides = overrides_for(cfg);
    auto client = make_client(c, cfg);
    std::optional<fs::path> log;
    if (c.o.log) log = *c.o.log;
    auto r = run_query(c.o.dataset, c.o.question, client, log, overrides);
    c.out() << r.answer;
    if (r.answer.empty() || r.answer.back() != '\n') c.out() << "\n";
    c.log.info("transcript {} ({} entries)", r.log_path.string(), r.transcript_entries);
    return kOk;
}

int cmd_export(Context& c) {
    auto loaded = load_dataset(c.o.dataset);
    write_text(c.o.out, export_document(loaded.dataset));
    c.out() << "exported " << loaded.dataset.records.size() << " records to " << c.o.out << "\n";
    return kOk;
}

int cmd_prompts_show(Context& c) {
    auto cfg = resolve_config(c);
    auto overrides = overrides_for(cfg);
    auto kind = parse_prompt_kind(c.o.kind);
    if (!kind) throw UserError("unknown prompt kind '" + c.o.kind + "'");
    std::string text;
    switch (*kind) {
        case PromptKind::Annotation: {
            std::optional<ContextAsset> asset;
            if (c.o.context) asset = ContextAsset::from_file(*c.o.context, c.o.context_description);
            text = build_annotation_prompt(asset, overrides).text();
            break;
        }
        case PromptKind::Filter:
            if (c.o.batch) {
                std::ifstream f(*c.o.batch, std::ios::binary);
                if (!f) throw IoError(*c.o.batch, "cannot open batch output");
                std::stringstream s;
                s << f.rdbuf();
                text = build_filter_prompt(s.str(), {fs::path(*c.o.batch).filename().string()}, overrides).text();
            } else {
                const auto* o = overrides.find("filter/body");
                text = o ? *o : std::string(default_section("filter/body"));
            }
            break;
        case PromptKind::Query:
            if (!c.o.dataset.empty() && !c.o.question.empty()) {
                text = build_query_prompt(c.o.dataset, c.o.question, overrides).text();
            } else {
                const auto* o = overrides.find("query/framing");
                text = o ? *o : std::string(default_section("query/framing"));
            }
            break;
    }
    c.out() << text;
    if (text.empty() || text.back() != '\n') c.out() << "\n";
    return kOk;
}

int cmd_prompts_list(Context& c) {
    for (const auto& s : TemplateOverrides::section_names()) c.out() << s << "\n";
    return kOk;
}

}  // namespace

int dispatch(const std::vector<std::string>& args, Environment& env) {
    auto proc = Environment::process();
    if (!env.out) env.out = proc.out;
    if (!env.err) env.err = proc.err;
    if (!env.getenv) env.getenv = proc.getenv;

    auto sink = std::make_shared<spdlog::sinks::ostream_sink_mt>(*env.err, true);
    spdlog::logger log("explcorpus", sink);
    log.set_pattern("[%l] %v");

    Options o;
    CLI::App app{"Batch annotation of research papers with a language model, and analysis of the results",
                 "explcorpus"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "explcorpus 0.1.0");

    auto add_config = [&](CLI::App* sub) {
        sub->add_option("--config", o.config, std::string("JSON config file (default: $") + kConfigEnvVar + ")");
    };

    auto* ingest_cmd = app.add_subcommand("ingest", "Build a manifest from a directory of PDFs and text sidecars");
    ingest_cmd->add_option("--source", o.source, "Directory of PDFs")->required();
    ingest_cmd->add_option("--metadata", o.metadata, "Per-document metadata (JSONL)");
    ingest_cmd->add_option("--extract-command", o.extract_command,
                           "Command producing a text sidecar; {pdf} and {txt} are substituted");
    ingest_cmd->add_option("--threads", o.threads, "Worker threads (0 = all cores)");
    ingest_cmd->add_option("--out", o.out, "Manifest file to write")->required();

    auto* sample_cmd = app.add_subcommand("sample", "Draw a seeded random sample from a manifest");
    sample_cmd->add_option("--manifest", o.manifest, "Input manifest")->required();
    sample_cmd->add_option("--n", o.n, "Sample size")->required();
    sample_cmd->add_option("--seed", o.seed, "Random seed")->required();
    sample_cmd->add_option("--out", o.out, "Manifest file to write")->required();

    auto* annotate_cmd = app.add_subcommand("annotate", "Send document batches to the model");
    annotate_cmd->add_option("--manifest", o.manifest, "Corpus manifest")->required();
    annotate_cmd->add_option("--out", o.out, "Output directory for batch files and checkpoint");
    annotate_cmd->add_option("--batch-size", o.batch_size, "Documents per batch");
    annotate_cmd->add_option("--context", o.context, "Survey excerpt appended to the prompt");
    annotate_cmd->add_option("--context-description", o.context_description, "Description of the excerpt");
    annotate_cmd->add_flag("--resume", o.resume, "Skip batches recorded in the checkpoint");
    annotate_cmd->add_flag("--skip-oversize", o.skip_oversize, "Exclude documents that exceed the window alone");
    annotate_cmd->add_flag("--dry-run", o.dry_run, "Print the batch plan and token estimates only");
    annotate_cmd->add_option("--prompts-dir", o.prompts_dir, "Directory of prompt section overrides");
    add_config(annotate_cmd);
    o.provider.attach(annotate_cmd);

    auto* filter_cmd = app.add_subcommand("filter", "Apply the strict filter prompt to batch outputs");
    filter_cmd->add_option("--dir", o.dir, "Directory holding batch outputs")->required();
    filter_cmd->add_option("--passes", o.passes, "Filter passes per batch");
    filter_cmd->add_flag("--dry-run", o.dry_run, "Print token estimates only");
    filter_cmd->add_option("--prompts-dir", o.prompts_dir, "Directory of prompt section overrides");
    add_config(filter_cmd);
    o.provider.attach(filter_cmd);

    auto* parse_cmd = app.add_subcommand("parse", "Parse batch outputs into a dataset");
    parse_cmd->add_option("--dir", o.dir, "Directory holding batch outputs")->required();
    parse_cmd->add_option("--out", o.out, "Dataset file to write (JSONL)")->required();
    parse_cmd->add_option("--manifest", o.manifest_opt, "Manifest whose digest is recorded in the dataset");
    parse_cmd->add_flag("--raw", o.raw, "Parse unfiltered outputs instead of filtered ones");
    parse_cmd->add_flag("--dedupe", o.dedupe_records, "Drop duplicate records");

    auto* verify_cmd = app.add_subcommand("verify", "Check every quote against its source text");
    verify_cmd->add_option("--dataset", o.dataset, "Dataset (JSONL)")->required();
    verify_cmd->add_option("--manifest", o.manifest, "Corpus manifest")->required();
    verify_cmd->add_option("--threshold", o.threshold, "Similarity threshold in (0, 1]");
    verify_cmd->add_option("--out", o.out_opt, "Annotated dataset (default: overwrite --dataset)");
    verify_cmd->add_option("--summary-json", o.summary_json, "Write the summary as JSON");
    verify_cmd->add_option("--threads", o.threads, "Worker threads (0 = all cores)");
    add_config(verify_cmd);

    auto* stats_cmd = app.add_subcommand("stats", "Subject-area distributions, richness and prevalence");
    stats_cmd->add_option("--manifest", o.manifest, "Corpus manifest")->required();
    stats_cmd->add_option("--dataset", o.dataset, "Dataset (JSONL)")->required();
    stats_cmd->add_option("--out", o.out, "Report directory")->required();
    stats_cmd->add_option("--tiers", o.tiers, "Quality tier fractions high,borderline,low");
    stats_cmd->add_option("--taxonomy", o.taxonomy, "Tag grouping (JSON)");
    add_config(stats_cmd);

    auto* query_cmd = app.add_subcommand("query", "Ask a question about a dataset");
    query_cmd->add_option("--dataset", o.dataset, "Dataset (JSONL or text)")->required();
    query_cmd->add_option("--question", o.question, "Question")->required();
    query_cmd->add_option("--log", o.log, "Transcript file (default: <dataset>.queries.jsonl)");
    query_cmd->add_option("--prompts-dir", o.prompts_dir, "Directory of prompt section overrides");
    add_config(query_cmd);
    o.provider.attach(query_cmd);

    auto* export_cmd = app.add_subcommand("export", "Write a dataset as a readable document");
    export_cmd->add_option("--dataset", o.dataset, "Dataset (JSONL)")->required();
    export_cmd->add_option("--out", o.out, "Output file")->required();

    auto* prompts_cmd = app.add_subcommand("prompts", "Inspect prompt templates");
    prompts_cmd->require_subcommand(1);
    auto* show_cmd = prompts_cmd->add_subcommand("show", "Print an assembled prompt");
    show_cmd->add_option("--kind", o.kind, "annotation, filter or query");
    show_cmd->add_option("--context", o.context, "Survey excerpt (annotation)");
    show_cmd->add_option("--context-description", o.context_description, "Description of the excerpt");
    show_cmd->add_option("--batch", o.batch, "Batch output to embed (filter)");
    show_cmd->add_option("--dataset", o.dataset, "Dataset (query)");
    show_cmd->add_option("--question", o.question, "Question (query)");
    show_cmd->add_option("--prompts-dir", o.prompts_dir, "Directory of prompt section overrides");
    add_config(show_cmd);
    auto* list_cmd = prompts_cmd->add_subcommand("list", "List prompt section names");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, *env.out, *env.err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, *env.out, *env.err);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e, *env.out, *env.err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, *env.out, *env.err);
        const CLI::App* target = &app;
        for (auto* sub : app.get_subcommands()) {
            target = sub;
            for (auto* s2 : sub->get_subcommands()) target = s2;
        }
        *env.err << target->help();
        return kUserError;
    }

    Context c{env, o, log};
    try {
        if (ingest_cmd->parsed()) return cmd_ingest(c);
        if (sample_cmd->parsed()) return cmd_sample(c);
        if (annotate_cmd->parsed()) return cmd_annotate(c);
        if (filter_cmd->parsed()) return cmd_filter(c);
        if (parse_cmd->parsed()) return cmd_parse(c);
        if (verify_cmd->parsed()) return cmd_verify(c);
        if (stats_cmd->parsed()) return cmd_stats(c);
        if (query_cmd->parsed()) return cmd_query(c);
        if (export_cmd->parsed()) return cmd_export(c);
        if (show_cmd->parsed()) return cmd_prompts_show(c);
        if (list_cmd->parsed()) return cmd_prompts_list(c);
    } catch (const std::exception& e) {
        log.error("{}", e.what());
        return kUserError;
    }
    *env.err << app.help();
    return kUserError;
}

}  // namespace explcorpus::cli
