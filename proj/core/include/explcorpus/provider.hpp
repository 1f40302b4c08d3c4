#pragma once

#include "explcorpus/prompts.hpp"
#include "explcorpus/tokens.hpp"

#include <atomic>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <semaphore>
#include <string>
#include <vector>

namespace explcorpus {

enum class Dialect { Gemini, OpenAI, Stub };

std::string_view to_string(Dialect d) noexcept;
std::optional<Dialect> parse_dialect(std::string_view text) noexcept;

struct ProviderConfig {
    Dialect dialect = Dialect::Gemini;
    std::string base_url = "https://generativelanguage.googleapis.com/v1beta";
    std::string model_name = "gemini-2.5-pro";
    std::string api_key_env = "GEMINI_API_KEY";
    std::uint64_t context_window_tokens = 1'000'000;
    std::uint64_t max_output_tokens = 65'536;
    int max_retries = 5;
    std::uint32_t backoff_base_ms = 1000;
    std::uint32_t backoff_cap_ms = 60'000;
    unsigned max_inflight = 4;
    double temperature = 0.0;
    /// Send the assembled prompt as a system message and the payload as the
    /// user message instead of one combined user message.
    bool system_message = false;
    std::uint32_t timeout_s = 600;
    /// Stub dialect only: directory of canned responses.
    std::filesystem::path fixtures_dir;
    /// Appends redacted request/response pairs here when set.
    std::optional<std::filesystem::path> audit_log;

    /// Throws std::invalid_argument when an invariant does not hold.
    void validate() const;
};

struct ModelResponse {
    std::string text;
    std::uint64_t input_tokens = 0;
    std::uint64_t output_tokens = 0;
    std::uint64_t latency_ms = 0;
    int attempts = 1;
};

/// What one attempt sends over the wire.
struct ChatRequest {
    PromptKind kind = PromptKind::Annotation;
    std::vector<std::string> payload_refs;
    std::string system_text;  // empty unless ProviderConfig::system_message
    std::string user_text;
    std::uint64_t estimated_input_tokens = 0;
    std::uint64_t max_output_tokens = 0;
    double temperature = 0.0;
};

enum class FailureKind { Timeout, RateLimited, Server, Network, Auth, Client, Protocol };

/// True for failures worth retrying.
bool is_transient(FailureKind kind) noexcept;

struct TransportFailure {
    FailureKind kind = FailureKind::Network;
    int http_status = 0;
    std::string message;
    std::optional<std::uint32_t> retry_after_ms;
};

struct TransportReply {
    std::string text;
    std::optional<std::uint64_t> input_tokens;
    std::optional<std::uint64_t> output_tokens;
};

/// One attempt against a backend. Implementations must be thread-safe.
class Transport {
  public:
    virtual ~Transport() = default;
    /// Returns the reply, or fills `failure` and returns nullopt.
    virtual std::optional<TransportReply> send(const ChatRequest& request, TransportFailure& failure) = 0;
};

/// HTTP chat-completions transport for the Gemini and OpenAI dialects.
class HttpTransport : public Transport {
  public:
    /// Reads the API key from the environment variable named in the config;
    /// throws AuthError when it is unset or empty.
    explicit HttpTransport(ProviderConfig config);
    std::optional<TransportReply> send(const ChatRequest& request, TransportFailure& failure) override;

    /// Request body for a dialect (exposed for tests).
    static std::string request_body(const ProviderConfig& config, const ChatRequest& request);
    /// Parses a success body; returns nullopt and fills `failure` when the
    /// body lacks the expected fields.
    static std::optional<TransportReply> parse_response(Dialect dialect, std::string_view body,
                                                        TransportFailure& failure);
    /// Maps an HTTP status to a failure kind.
    static FailureKind classify_status(int status) noexcept;

  private:
    ProviderConfig config_;
    std::string api_key_;
};

/// Stable key for a stub fixture: hex digest of the kind and sorted refs.
std::string stub_fixture_key(PromptKind kind, std::vector<std::string> payload_refs);

/// Deterministic offline backend. Replies come from `<fixtures_dir>/<key>.txt`
/// (falling back to `default.txt`); `<key>.fail` holding "N" fails the first N
/// attempts with a server error, or every attempt when it holds "permanent".
/// Scripted failures can also be registered in code.
class StubTransport : public Transport {
  public:
    explicit StubTransport(std::filesystem::path fixtures_dir = {});

    std::optional<TransportReply> send(const ChatRequest& request, TransportFailure& failure) override;

    /// Fails the next `count` attempts for `key` with `failure`.
    void script_failures(const std::string& key, int count, TransportFailure failure = {FailureKind::Server, 503, "scripted outage", std::nullopt});
    /// Every attempt for `key` fails.
    void fail_always(const std::string& key, TransportFailure failure = {FailureKind::Server, 500, "scripted permanent failure", std::nullopt});
    /// In-memory reply for `key`, taking precedence over fixture files.
    void set_reply(const std::string& key, std::string text);
    /// Artificial per-attempt latency, used to observe concurrency.
    void set_latency(std::chrono::milliseconds latency) { latency_ = latency; }

    std::uint64_t calls() const noexcept { return calls_.load(); }
    int max_concurrent() const noexcept { return high_water_.load(); }
    std::uint64_t max_request_tokens() const noexcept { return max_tokens_seen_.load(); }
    std::vector<ChatRequest> requests() const;

  private:
    std::filesystem::path dir_;
    mutable std::mutex mutex_;
    std::map<std::string, int> scripted_;
    std::map<std::string, TransportFailure> scripted_failure_;
    std::map<std::string, TransportFailure> permanent_;
    std::map<std::string, int> file_failures_seen_;
    std::map<std::string, std::string> replies_;
    std::vector<ChatRequest> log_;
    std::chrono::milliseconds latency_{0};
    std::atomic<std::uint64_t> calls_{0};
    std::atomic<int> inflight_{0};
    std::atomic<int> high_water_{0};
    std::atomic<std::uint64_t> max_tokens_seen_{0};
};

using Sleeper = std::function<void(std::chrono::milliseconds)>;

/// Thread-safe client: context budgeting, at most `max_inflight` concurrent
/// attempts, exponential backoff with +/-25% jitter on transient failures.
class ChatClient {
  public:
    ChatClient(ProviderConfig config, std::shared_ptr<Transport> transport, Sleeper sleeper = {});

    /// Throws ContextOverflow before any network call when the request would
    /// not fit, AuthError on rejected credentials, ExhaustedRetries after
    /// max_retries + 1 failed attempts, ProviderError for other failures.
    ModelResponse complete(const PromptBundle& bundle, std::string_view payload_text = {});

    /// Tokens a call with this bundle and payload would need (input + max output).
    std::uint64_t required_tokens(const PromptBundle& bundle, std::string_view payload_text = {}) const;

    /// Backoff before retry number `attempt` (0-based), before jitter.
    std::chrono::milliseconds base_delay(int attempt) const;

    const ProviderConfig& config() const noexcept { return config_; }
    std::uint64_t calls() const noexcept { return calls_.load(); }

  private:
    ChatRequest make_request(const PromptBundle& bundle, std::string_view payload_text) const;
    std::chrono::milliseconds jittered(int attempt, std::optional<std::uint32_t> retry_after_ms);
    void audit(const ChatRequest& request, const std::optional<TransportReply>& reply,
               const TransportFailure* failure, int attempt);

    ProviderConfig config_;
    std::shared_ptr<Transport> transport_;
    Sleeper sleeper_;
    std::counting_semaphore<> inflight_;
    std::mutex rng_mutex_;
    std::mt19937_64 rng_;
    std::mutex audit_mutex_;
    std::atomic<std::uint64_t> calls_{0};
};

/// Transport for a config: StubTransport for the stub dialect, HttpTransport otherwise.
std::shared_ptr<Transport> make_transport(const ProviderConfig& config);

}  // namespace explcorpus
