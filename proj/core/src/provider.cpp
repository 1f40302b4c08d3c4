#include "explcorpus/provider.hpp"

#include "detail/fs_util.hpp"
#include "detail/utf8.hpp"
#include "explcorpus/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <stdexcept>
#include <thread>

namespace explcorpus {

namespace {

std::string utc_timestamp() {
    auto now = std::chrono::system_clock::now();
    std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string redact(std::string text, const std::string& secret) {
    if (secret.empty()) return text;
    for (std::size_t pos = 0; (pos = text.find(secret, pos)) != std::string::npos;) {
        text.replace(pos, secret.size(), "[REDACTED]");
    }
    return text;
}

std::string describe(const TransportFailure& f) {
    std::string s = f.message.empty() ? "transport failure" : f.message;
    if (f.http_status) s += " (HTTP " + std::to_string(f.http_status) + ")";
    return s;
}

}  // namespace

std::uint64_t estimate_tokens_for_chars(std::uint64_t code_points) noexcept {
    std::uint64_t base = (code_points + 3) / 4;
    return (base * 11 + 9) / 10;
}

std::uint64_t estimate_tokens(std::string_view text) noexcept {
    return estimate_tokens_for_chars(detail::codepoint_count(text));
}

std::string_view to_string(Dialect d) noexcept {
    switch (d) {
        case Dialect::Gemini: return "gemini";
        case Dialect::OpenAI: return "openai";
        case Dialect::Stub: return "stub";
    }
    return "gemini";
}

std::optional<Dialect> parse_dialect(std::string_view text) noexcept {
    for (auto d : {Dialect::Gemini, Dialect::OpenAI, Dialect::Stub}) {
        if (to_string(d) == text) return d;
    }
    return std::nullopt;
}

bool is_transient(FailureKind kind) noexcept {
    switch (kind) {
        case FailureKind::Timeout:
        case FailureKind::RateLimited:
        case FailureKind::Server:
        case FailureKind::Network:
            return true;
        default:
            return false;
    }
}

void ProviderConfig::validate() const {
    if (context_window_tokens == 0 || max_output_tokens == 0) {
        throw std::invalid_argument("context_window_tokens and max_output_tokens must be positive");
    }
    if (context_window_tokens < max_output_tokens) {
        throw std::invalid_argument("context_window_tokens must be at least max_output_tokens");
    }
    if (max_inflight < 1) {
        throw std::invalid_argument("max_inflight must be at least 1");
    }
    if (max_retries < 0) {
        throw std::invalid_argument("max_retries must not be negative");
    }
    if (backoff_base_ms == 0) {
        throw std::invalid_argument("backoff_base_ms must be positive");
    }
}

ChatClient::ChatClient(ProviderConfig config, std::shared_ptr<Transport> transport, Sleeper sleeper)
    : config_(std::move(config)),
      transport_(std::move(transport)),
      sleeper_(std::move(sleeper)),
      inflight_(static_cast<std::ptrdiff_t>(std::max(1u, config_.max_inflight))),
      rng_(std::random_device{}()) {
    config_.validate();
    if (!transport_) {
        throw std::invalid_argument("ChatClient needs a transport");
    }
    if (!sleeper_) {
        sleeper_ = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
    }
}

ChatRequest ChatClient::make_request(const PromptBundle& bundle, std::string_view payload_text) const {
    ChatRequest r;
    r.kind = bundle.kind;
    r.payload_refs = bundle.payload_refs;
    auto prompt = bundle.text();
    if (config_.system_message) {
        r.system_text = std::move(prompt);
        r.user_text = std::string(payload_text);
    } else {
        r.user_text = std::move(prompt);
        if (!payload_text.empty()) {
            if (!r.user_text.empty()) r.user_text += "\n\n";
            r.user_text += payload_text;
        }
    }
    r.estimated_input_tokens = estimate_tokens(r.system_text) + estimate_tokens(r.user_text);
    if (!r.system_text.empty() && !r.user_text.empty()) {
        // Estimate the concatenation so splitting never lowers the count.
        r.estimated_input_tokens =
            estimate_tokens_for_chars(detail::codepoint_count(r.system_text) + detail::codepoint_count(r.user_text));
    }
    r.max_output_tokens = config_.max_output_tokens;
    r.temperature = config_.temperature;
    return r;
}

std::uint64_t ChatClient::required_tokens(const PromptBundle& bundle, std::string_view payload_text) const {
    return make_request(bundle, payload_text).estimated_input_tokens + config_.max_output_tokens;
}

std::chrono::milliseconds ChatClient::base_delay(int attempt) const {
    double d = static_cast<double>(config_.backoff_base_ms) * std::pow(2.0, attempt);
    d = std::min(d, static_cast<double>(config_.backoff_cap_ms));
    return std::chrono::milliseconds(static_cast<std::int64_t>(d));
}

std::chrono::milliseconds ChatClient::jittered(int attempt, std::optional<std::uint32_t> retry_after_ms) {
    double factor;
    {
        std::lock_guard lock(rng_mutex_);
        factor = std::uniform_real_distribution<double>(0.75, 1.25)(rng_);
    }
    auto d = static_cast<std::int64_t>(std::llround(static_cast<double>(base_delay(attempt).count()) * factor));
    if (retry_after_ms) {
        d = std::max<std::int64_t>(d, *retry_after_ms);
    }
    d = std::min<std::int64_t>(d, config_.backoff_cap_ms);
    return std::chrono::milliseconds(d);
}

void ChatClient::audit(const ChatRequest& request, const std::optional<TransportReply>& reply,
                       const TransportFailure* failure, int attempt) {
    if (!config_.audit_log) return;
    const char* key_value = config_.api_key_env.empty() ? nullptr : std::getenv(config_.api_key_env.c_str());
    std::string secret = key_value ? key_value : "";
    nlohmann::ordered_json j;
    j["time"] = utc_timestamp();
    j["attempt"] = attempt;
    j["kind"] = std::string(to_string(request.kind));
    j["payload_refs"] = request.payload_refs;
    j["estimated_input_tokens"] = request.estimated_input_tokens;
    j["request_body"] = redact(HttpTransport::request_body(config_, request), secret);
    if (reply) {
        j["response_text"] = redact(reply->text, secret);
    } else if (failure) {
        j["error"] = redact(describe(*failure), secret);
    }
    std::lock_guard lock(audit_mutex_);
    detail::append_file(*config_.audit_log, j.dump() + "\n");
}

ModelResponse ChatClient::complete(const PromptBundle& bundle, std::string_view payload_text) {
    auto request = make_request(bundle, payload_text);
    const auto required = request.estimated_input_tokens + config_.max_output_tokens;
    if (required > config_.context_window_tokens) {
        throw ContextOverflow(required, config_.context_window_tokens, "split the batch into smaller requests");
    }

    const auto started = std::chrono::steady_clock::now();
    TransportFailure last;
    for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
        TransportFailure failure;
        std::optional<TransportReply> reply;
        {
            inflight_.acquire();
            struct Release {
                std::counting_semaphore<>& s;
                ~Release() { s.release(); }
            } release{inflight_};
            ++calls_;
            reply = transport_->send(request, failure);
        }
        audit(request, reply, reply ? nullptr : &failure, attempt + 1);
        if (reply) {
            ModelResponse r;
            r.text = std::move(reply->text);
            r.input_tokens = reply->input_tokens.value_or(request.estimated_input_tokens);
            r.output_tokens = reply->output_tokens.value_or(estimate_tokens(r.text));
            r.latency_ms = static_cast<std::uint64_t>(std::chrono::duration_cast<std::chrono::milliseconds>(
                                                          std::chrono::steady_clock::now() - started)
                                                          .count());
            r.attempts = attempt + 1;
            return r;
        }
        if (failure.kind == FailureKind::Auth) {
            throw AuthError("provider rejected credentials: " + describe(failure));
        }
        if (!is_transient(failure.kind)) {
            throw ProviderError(describe(failure));
        }
        last = failure;
        if (attempt < config_.max_retries) {
            sleeper_(jittered(attempt, failure.retry_after_ms));
        }
    }
    throw ExhaustedRetries(config_.max_retries + 1, describe(last));
}

std::shared_ptr<Transport> make_transport(const ProviderConfig& config) {
    if (config.dialect == Dialect::Stub) {
        if (config.fixtures_dir.empty()) {
            throw std::invalid_argument("the stub provider needs a fixtures directory");
        }
        return std::make_shared<StubTransport>(config.fixtures_dir);
    }
    return std::make_shared<HttpTransport>(config);
}

}  // namespace explcorpus
