#include "explcorpus/prompts.hpp"

#include "detail/fs_util.hpp"
#include "detail/prompt_defaults.hpp"
#include "detail/utf8.hpp"
#include "explcorpus/error.hpp"
#include "explcorpus/tokens.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>

namespace explcorpus {

namespace fs = std::filesystem;

namespace {

std::string section_text(std::string_view name, const TemplateOverrides& overrides) {
    if (const auto* o = overrides.find(name)) {
        return *o;
    }
    return std::string(default_section(name));
}

// Section files end with a newline; joins use exactly one blank line.
std::string strip_trailing_newlines(std::string s) {
    while (!s.empty() && (s.back() == '\n' || s.back() == '\r')) s.pop_back();
    return s;
}

std::string join_sections(std::initializer_list<std::string> parts) {
    std::string out;
    for (const auto& p : parts) {
        auto t = strip_trailing_newlines(p);
        if (t.empty()) continue;
        if (!out.empty()) out += "\n\n";
        out += t;
    }
    return out;
}

void finalize(PromptBundle& b) { b.estimated_tokens = estimate_tokens(b.text()); }

}  // namespace

std::string_view to_string(PromptKind kind) noexcept {
    switch (kind) {
        case PromptKind::Annotation: return "annotation";
        case PromptKind::Filter: return "filter";
        case PromptKind::Query: return "query";
    }
    return "annotation";
}

std::optional<PromptKind> parse_prompt_kind(std::string_view text) noexcept {
    for (auto k : {PromptKind::Annotation, PromptKind::Filter, PromptKind::Query}) {
        if (to_string(k) == text) return k;
    }
    return std::nullopt;
}

std::string PromptBundle::text() const {
    std::string out = join_sections({persona, instructions});
    if (context_excerpt && !context_excerpt->empty()) {
        out += "\n\n";
        out += strip_trailing_newlines(*context_excerpt);
    }
    if (!payload.empty()) {
        if (!out.empty()) out += "\n\n";
        out += payload;
    }
    return out;
}

ContextAsset ContextAsset::from_file(const fs::path& path, std::string description) {
    std::error_code ec;
    if (!fs::is_regular_file(path, ec)) {
        throw IoError(path, "context asset not found");
    }
    ContextAsset a;
    a.path = path;
    a.description = std::move(description);
    a.char_count = detail::codepoint_count(detail::read_file(path));
    return a;
}

const std::vector<std::string>& TemplateOverrides::section_names() {
    static const std::vector<std::string> names = {
        "annotation/persona",      "annotation/phenomena", "annotation/proof_types", "annotation/instructions",
        "annotation/excerpt_header", "filter/body",        "query/framing",
    };
    return names;
}

void TemplateOverrides::set(const std::string& section, std::string text) {
    const auto& names = section_names();
    if (std::find(names.begin(), names.end(), section) == names.end()) {
        throw std::invalid_argument("unknown prompt section '" + section + "'");
    }
    sections_[section] = std::move(text);
}

const std::string* TemplateOverrides::find(std::string_view section) const {
    auto it = sections_.find(section);
    return it == sections_.end() ? nullptr : &it->second;
}

TemplateOverrides TemplateOverrides::from_directory(const fs::path& dir) {
    std::error_code ec;
    if (!fs::is_directory(dir, ec)) {
        throw IoError(dir, "prompt directory not found");
    }
    TemplateOverrides o;
    for (const auto& name : section_names()) {
        auto p = dir / (name + ".txt");
        if (fs::is_regular_file(p, ec)) {
            o.set(name, detail::read_file(p));
        }
    }
    return o;
}

std::string_view default_section(std::string_view section) { return detail::default_prompt_section(section); }

PromptBundle build_annotation_prompt(const std::optional<ContextAsset>& asset, const TemplateOverrides& overrides) {
    PromptBundle b;
    b.kind = PromptKind::Annotation;
    b.persona = strip_trailing_newlines(section_text("annotation/persona", overrides));
    b.instructions = join_sections({section_text("annotation/phenomena", overrides),
                                    section_text("annotation/proof_types", overrides),
                                    section_text("annotation/instructions", overrides)});
    if (asset) {
        auto excerpt = detail::read_file(asset->path);
        if (excerpt.empty()) {
            b.context_excerpt = std::string();
        } else {
            b.context_excerpt = strip_trailing_newlines(section_text("annotation/excerpt_header", overrides)) +
                                " " + strip_trailing_newlines(excerpt);
        }
    }
    finalize(b);
    return b;
}

PromptBundle build_filter_prompt(std::string_view batch_output_text, std::vector<std::string> payload_refs,
                                 const TemplateOverrides& overrides) {
    if (batch_output_text.empty()) {
        throw std::invalid_argument("filter prompt needs non-empty batch output text");
    }
    PromptBundle b;
    b.kind = PromptKind::Filter;
    b.instructions = strip_trailing_newlines(section_text("filter/body", overrides));
    b.payload = std::string(batch_output_text);
    b.payload_refs = std::move(payload_refs);
    finalize(b);
    return b;
}

PromptBundle build_query_prompt(const fs::path& dataset_path, std::string_view question,
                                const TemplateOverrides& overrides) {
    std::error_code ec;
    if (!fs::is_regular_file(dataset_path, ec)) {
        throw IoError(dataset_path, "dataset not found");
    }
    auto q = std::string(question);
    if (std::all_of(q.begin(), q.end(), [](unsigned char c) { return std::isspace(c); })) {
        throw std::invalid_argument("query question must not be empty");
    }
    PromptBundle b;
    b.kind = PromptKind::Query;
    b.instructions = join_sections({section_text("query/framing", overrides), q});
    b.payload_refs = {dataset_path.filename().string()};
    finalize(b);
    return b;
}

}  // namespace explcorpus
