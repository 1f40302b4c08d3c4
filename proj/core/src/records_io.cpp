#include "explcorpus/records.hpp"

#include "detail/fs_util.hpp"
#include "explcorpus/error.hpp"

#include <json.hpp>

#include <map>
#include <set>
#include <tuple>

namespace explcorpus {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

constexpr std::string_view kFormat = "explcorpus.records";
constexpr int kVersion = 1;

template <typename T>
std::optional<T> get_opt(const json& j, const char* key, const fs::path& origin, std::size_t line) {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) {
        return std::nullopt;
    }
    try {
        return it->get<T>();
    } catch (const json::exception&) {
        throw FormatError(origin, line, std::string("field '") + key + "' has the wrong type");
    }
}

template <typename T>
T get_req(const json& j, const char* key, const fs::path& origin, std::size_t line) {
    auto v = get_opt<T>(j, key, origin, line);
    if (!v) {
        throw FormatError(origin, line, std::string("missing field '") + key + "'");
    }
    return *v;
}

ordered_json to_json(const ExampleRecord& r) {
    ordered_json j;
    j["batch_index"] = r.batch_index;
    j["source_doc_id"] = r.source_doc_id;
    j["title"] = r.title;
    j["authors"] = r.authors ? json(*r.authors) : json(nullptr);
    j["finding"] = r.finding;
    j["quote"] = r.quote ? json(*r.quote) : json(nullptr);
    j["commentary"] = r.commentary;
    j["page"] = r.page ? json(*r.page) : json(nullptr);
    if (r.verification) {
        const auto& v = *r.verification;
        ordered_json vj;
        vj["matched"] = v.matched;
        vj["similarity"] = v.similarity;
        vj["span_start"] = v.span_start ? json(*v.span_start) : json(nullptr);
        vj["span_end"] = v.span_end ? json(*v.span_end) : json(nullptr);
        vj["threshold_used"] = v.threshold_used;
        j["verification"] = vj;
    } else {
        j["verification"] = nullptr;
    }
    j["quality_label"] = r.quality_label ? json(std::string(to_string(*r.quality_label))) : json(nullptr);
    return j;
}

ExampleRecord from_json(const json& j, const fs::path& origin, std::size_t line) {
    ExampleRecord r;
    r.batch_index = get_req<std::uint32_t>(j, "batch_index", origin, line);
    r.source_doc_id = get_req<std::string>(j, "source_doc_id", origin, line);
    r.title = get_opt<std::string>(j, "title", origin, line).value_or("");
    r.authors = get_opt<std::string>(j, "authors", origin, line);
    r.finding = get_opt<std::string>(j, "finding", origin, line).value_or("");
    r.quote = get_opt<std::string>(j, "quote", origin, line);
    r.commentary = get_opt<std::string>(j, "commentary", origin, line).value_or("");
    r.page = get_opt<int>(j, "page", origin, line);
    if (auto it = j.find("verification"); it != j.end() && !it->is_null()) {
        if (!it->is_object()) {
            throw FormatError(origin, line, "field 'verification' must be an object");
        }
        VerificationResult v;
        v.matched = get_req<bool>(*it, "matched", origin, line);
        v.similarity = get_req<double>(*it, "similarity", origin, line);
        v.span_start = get_opt<std::size_t>(*it, "span_start", origin, line);
        v.span_end = get_opt<std::size_t>(*it, "span_end", origin, line);
        v.threshold_used = get_req<double>(*it, "threshold_used", origin, line);
        r.verification = v;
    }
    if (auto label = get_opt<std::string>(j, "quality_label", origin, line)) {
        r.quality_label = parse_quality_label(*label);
        if (!r.quality_label) {
            throw FormatError(origin, line, "unknown quality_label '" + *label + "'");
        }
    }
    if (r.finding.empty() && r.commentary.empty() && (!r.quote || r.quote->empty())) {
        throw FormatError(origin, line, "record has no finding, quote or commentary");
    }
    return r;
}

}  // namespace

std::string_view to_string(QualityLabel label) noexcept {
    switch (label) {
        case QualityLabel::High: return "High";
        case QualityLabel::Borderline: return "Borderline";
        case QualityLabel::Low: return "Low";
    }
    return "Low";
}

std::optional<QualityLabel> parse_quality_label(std::string_view text) noexcept {
    for (auto l : {QualityLabel::High, QualityLabel::Borderline, QualityLabel::Low}) {
        if (to_string(l) == text) return l;
    }
    return std::nullopt;
}

std::string dataset_to_jsonl(const Dataset& ds) {
    ordered_json header;
    header["format"] = kFormat;
    header["version"] = kVersion;
    header["record_count"] = ds.records.size();
    header["source_manifest_hash"] = ds.source_manifest_hash;
    header["filter_pass_count"] = ds.filter_pass_count;
    std::string out = header.dump() + "\n";
    for (const auto& r : ds.records) {
        out += to_json(r).dump() + "\n";
    }
    return out;
}

LoadedDataset dataset_from_jsonl(std::string_view text, const fs::path& origin,
                                 const std::optional<std::string>& expected_manifest_hash) {
    LoadedDataset out;
    bool have_header = false;
    std::size_t expected_count = 0;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        auto end = text.find('\n', pos);
        bool terminated = end != std::string_view::npos;
        if (!terminated) end = text.size();
        auto line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty()) {
            continue;
        }
        json j;
        try {
            j = json::parse(line);
        } catch (const json::parse_error& e) {
            throw FormatError(origin, line_no, std::string("malformed record: ") + e.what());
        }
        if (!j.is_object()) {
            throw FormatError(origin, line_no, "expected a JSON object");
        }
        if (!have_header) {
            if (j.value("format", "") != kFormat) {
                throw FormatError(origin, line_no, "missing dataset header");
            }
            if (j.value("version", 0) != kVersion) {
                throw FormatError(origin, line_no, "unsupported dataset version");
            }
            expected_count = get_req<std::size_t>(j, "record_count", origin, line_no);
            out.dataset.source_manifest_hash = get_opt<std::string>(j, "source_manifest_hash", origin, line_no).value_or("");
            out.dataset.filter_pass_count = get_opt<std::uint32_t>(j, "filter_pass_count", origin, line_no).value_or(0);
            have_header = true;
            continue;
        }
        if (!terminated) {
            throw FormatError(origin, line_no, "record line is not newline-terminated (truncated file?)");
        }
        out.dataset.records.push_back(from_json(j, origin, line_no));
    }
    if (!have_header) {
        throw FormatError(origin, 1, "missing dataset header");
    }
    if (out.dataset.records.size() != expected_count) {
        throw FormatError(origin, line_no + 1,
                          "dataset truncated: header announces " + std::to_string(expected_count) +
                              " records, found " + std::to_string(out.dataset.records.size()));
    }
    if (expected_manifest_hash && !out.dataset.source_manifest_hash.empty() &&
        *expected_manifest_hash != out.dataset.source_manifest_hash) {
        out.warnings.push_back("dataset was produced from a different manifest (digest " +
                               out.dataset.source_manifest_hash.substr(0, 12) + " vs " +
                               expected_manifest_hash->substr(0, 12) + ")");
    }
    return out;
}

void save_dataset(const Dataset& ds, const fs::path& path) { detail::write_file_atomic(path, dataset_to_jsonl(ds)); }

LoadedDataset load_dataset(const fs::path& path, const std::optional<std::string>& expected_manifest_hash) {
    return dataset_from_jsonl(detail::read_file(path), path, expected_manifest_hash);
}

Dataset dedupe(const Dataset& ds) {
    Dataset out;
    out.source_manifest_hash = ds.source_manifest_hash;
    out.filter_pass_count = ds.filter_pass_count;
    std::set<std::tuple<std::string, std::optional<std::string>, std::string>> seen;
    for (const auto& r : ds.records) {
        if (seen.emplace(r.source_doc_id, r.quote, r.finding).second) {
            out.records.push_back(r);
        }
    }
    return out;
}

std::string export_document(const Dataset& ds) {
    std::set<std::string> sources;
    for (const auto& r : ds.records) {
        sources.insert(r.source_doc_id);
    }
    std::string out = "# Explanation examples\n\n";
    out += std::to_string(ds.records.size()) + " examples from " + std::to_string(sources.size()) +
           " distinct sources";
    if (ds.filter_pass_count > 0) {
        out += " after " + std::to_string(ds.filter_pass_count) + " filter pass" +
               (ds.filter_pass_count == 1 ? "" : "es");
    }
    out += ".\n";
    std::map<std::uint32_t, std::vector<const ExampleRecord*>> by_batch;
    for (const auto& r : ds.records) {
        by_batch[r.batch_index].push_back(&r);
    }
    for (const auto& [batch, records] : by_batch) {
        out += "\n## batch_" + std::to_string(batch) + "_output.txt\n";
        for (const auto* r : records) {
            out += "\n" + render_record(*r);
            if (r->verification) {
                char buf[64];
                std::snprintf(buf, sizeof buf, "%.2f", r->verification->similarity);
                out += std::string("  (quote ") + (r->verification->matched ? "verified" : "NOT verified") +
                       ", similarity " + buf + ")\n";
            }
            if (r->quality_label) {
                out += "  (quality: " + std::string(to_string(*r->quality_label)) + ")\n";
            }
        }
    }
    return out;
}

}  // namespace explcorpus
