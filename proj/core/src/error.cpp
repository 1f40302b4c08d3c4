#include "explcorpus/error.hpp"

#include <utility>

namespace explcorpus {

IoError::IoError(const std::filesystem::path& path, const std::string& what)
    : Error(path.string() + ": " + what), path_(path) {}

FormatError::FormatError(const std::filesystem::path& path, std::size_t line, const std::string& what)
    : Error(path.string() + ":" + std::to_string(line) + ": " + what), path_(path), line_(line) {}

MissingTextError::MissingTextError(std::string doc_id, const std::filesystem::path& text_path)
    : Error("missing text for document '" + doc_id + "' (" + text_path.string() + ")"),
      doc_id_(std::move(doc_id)) {}

ContextOverflow::ContextOverflow(std::uint64_t required_tokens, std::uint64_t available_tokens,
                                 const std::string& hint)
    : Error("context overflow: request needs " + std::to_string(required_tokens) +
            " tokens but only " + std::to_string(available_tokens) + " are available" +
            (hint.empty() ? std::string{} : "; " + hint)),
      required_(required_tokens),
      available_(available_tokens) {}

ExhaustedRetries::ExhaustedRetries(int attempts, std::string last_error)
    : Error("gave up after " + std::to_string(attempts) + " attempts: " + last_error),
      attempts_(attempts),
      last_error_(std::move(last_error)) {}

OversizeDocument::OversizeDocument(std::string doc_id, std::uint64_t tokens, std::uint64_t budget)
    : Error("document '" + doc_id + "' needs " + std::to_string(tokens) +
            " tokens alone, more than the " + std::to_string(budget) + " available per batch"),
      doc_id_(std::move(doc_id)) {}

}  // namespace explcorpus
