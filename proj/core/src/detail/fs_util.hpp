#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace explcorpus::detail {

/// Reads a whole file; throws IoError.
std::string read_file(const std::filesystem::path& path);

/// Writes `content` to a sibling temporary file, flushes, then renames over
/// `path`. Readers observe either the old or the new content, never a mix.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

/// Appends `content` to `path`, creating it when absent.
void append_file(const std::filesystem::path& path, std::string_view content);

}  // namespace explcorpus::detail
