#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>

namespace explcorpus {

/// Base class for every error raised by the pipeline.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// A file could not be read, written or listed.
class IoError : public Error {
  public:
    IoError(const std::filesystem::path& path, const std::string& what);
    const std::filesystem::path& path() const noexcept { return path_; }

  private:
    std::filesystem::path path_;
};

/// Malformed line-delimited input. `line()` is 1-based.
class FormatError : public Error {
  public:
    FormatError(const std::filesystem::path& path, std::size_t line, const std::string& what);
    const std::filesystem::path& path() const noexcept { return path_; }
    std::size_t line() const noexcept { return line_; }

  private:
    std::filesystem::path path_;
    std::size_t line_;
};

/// Document text (sidecar) is missing or unreadable.
class MissingTextError : public Error {
  public:
    MissingTextError(std::string doc_id, const std::filesystem::path& text_path);
    const std::string& doc_id() const noexcept { return doc_id_; }

  private:
    std::string doc_id_;
};

/// Request would not fit into the provider context window.
class ContextOverflow : public Error {
  public:
    ContextOverflow(std::uint64_t required_tokens, std::uint64_t available_tokens,
                    const std::string& hint = {});
    std::uint64_t required_tokens() const noexcept { return required_; }
    std::uint64_t available_tokens() const noexcept { return available_; }

  private:
    std::uint64_t required_;
    std::uint64_t available_;
};

class AuthError : public Error {
  public:
    using Error::Error;
};

/// Non-transient provider failure (bad request, unparseable response, missing fixture).
class ProviderError : public Error {
  public:
    using Error::Error;
};

class ExhaustedRetries : public Error {
  public:
    ExhaustedRetries(int attempts, std::string last_error);
    int attempts() const noexcept { return attempts_; }
    const std::string& last_error() const noexcept { return last_error_; }

  private:
    int attempts_;
    std::string last_error_;
};

/// Checkpoint in an output directory was written for a different manifest.
class CheckpointMismatch : public Error {
  public:
    using Error::Error;
};

/// A single document exceeds the provider window on its own.
class OversizeDocument : public Error {
  public:
    OversizeDocument(std::string doc_id, std::uint64_t tokens, std::uint64_t budget);
    const std::string& doc_id() const noexcept { return doc_id_; }

  private:
    std::string doc_id_;
};

}  // namespace explcorpus
