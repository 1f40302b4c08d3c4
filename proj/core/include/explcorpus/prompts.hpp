#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace explcorpus {

enum class PromptKind { Annotation, Filter, Query };

std::string_view to_string(PromptKind kind) noexcept;
std::optional<PromptKind> parse_prompt_kind(std::string_view text) noexcept;

/// A fully assembled prompt. `text()` is what gets sent ahead of any
/// per-request payload (document batch or dataset).
struct PromptBundle {
    PromptKind kind = PromptKind::Annotation;
    std::string persona;
    std::string instructions;
    std::optional<std::string> context_excerpt;
    /// Text carried inside the bundle itself (the batch output for filter prompts).
    std::string payload;
    /// Documents or files the payload refers to; keys stub fixtures.
    std::vector<std::string> payload_refs;
    std::uint64_t estimated_tokens = 0;

    std::string text() const;

    friend bool operator==(const PromptBundle&, const PromptBundle&) = default;
};

/// User-supplied survey excerpt appended to the annotation prompt.
struct ContextAsset {
    std::filesystem::path path;
    std::string description;
    std::uint64_t char_count = 0;

    /// Throws IoError when the file does not exist.
    static ContextAsset from_file(const std::filesystem::path& path, std::string description = {});
};

/// Whole-section replacements keyed by section name, e.g. "annotation/persona".
class TemplateOverrides {
  public:
    /// Section names this tool understands.
    static const std::vector<std::string>& section_names();

    /// Throws std::invalid_argument for an unknown section.
    void set(const std::string& section, std::string text);
    const std::string* find(std::string_view section) const;
    bool empty() const noexcept { return sections_.empty(); }

    /// Reads every `<section>.txt` present below `dir`. Missing files keep
    /// the default.
    static TemplateOverrides from_directory(const std::filesystem::path& dir);

  private:
    std::map<std::string, std::string, std::less<>> sections_;
};

/// Built-in text of one section; empty for unknown names.
std::string_view default_section(std::string_view section);

PromptBundle build_annotation_prompt(const std::optional<ContextAsset>& asset = std::nullopt,
                                     const TemplateOverrides& overrides = {});

/// Throws std::invalid_argument when `batch_output_text` is empty.
PromptBundle build_filter_prompt(std::string_view batch_output_text,
                                 std::vector<std::string> payload_refs = {},
                                 const TemplateOverrides& overrides = {});

/// Throws IoError for a missing dataset and std::invalid_argument for a blank question.
PromptBundle build_query_prompt(const std::filesystem::path& dataset_path, std::string_view question,
                                const TemplateOverrides& overrides = {});

}  // namespace explcorpus
