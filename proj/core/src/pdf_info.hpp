#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>

namespace explcorpus::detail {

/// Values from a PDF document-information dictionary (/Title, /Author,
/// /Subject, /Keywords). Only uncompressed dictionaries are visible; objects
/// inside compressed object streams are not decoded.
struct PdfInfo {
    std::map<std::string, std::string> fields;

    std::optional<std::string> get(std::string_view key) const;
};

PdfInfo scan_pdf_info(std::string_view pdf_bytes);
std::optional<PdfInfo> read_pdf_info(const std::filesystem::path& pdf_path);

/// First arXiv-style category tag ("math.AG", "cs.LG", ...) in `text`,
/// canonicalized to lowercase archive and uppercase subject.
std::optional<std::string> find_category_tag(std::string_view text);

}  // namespace explcorpus::detail
