#include "explcorpus/error.hpp"
#include "explcorpus/provider.hpp"

#include <httplib.h>
#include <json.hpp>

#include <cstdlib>

namespace explcorpus {

using nlohmann::json;

namespace {

struct Endpoint {
    std::string origin;  // scheme://host[:port]
    std::string path;    // path prefix without trailing slash
};

Endpoint split_url(const std::string& url) {
    auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) {
        throw std::invalid_argument("base_url must include a scheme: " + url);
    }
    auto path_start = url.find('/', scheme_end + 3);
    Endpoint e;
    e.origin = url.substr(0, path_start);
    e.path = path_start == std::string::npos ? "" : url.substr(path_start);
    while (!e.path.empty() && e.path.back() == '/') e.path.pop_back();
    return e;
}

}  // namespace

HttpTransport::HttpTransport(ProviderConfig config) : config_(std::move(config)) {
    const char* key = config_.api_key_env.empty() ? nullptr : std::getenv(config_.api_key_env.c_str());
    if (key == nullptr || *key == '\0') {
        throw AuthError("environment variable '" + config_.api_key_env + "' holding the API key is not set");
    }
    api_key_ = key;
    split_url(config_.base_url);
}

std::string HttpTransport::request_body(const ProviderConfig& config, const ChatRequest& request) {
    json body;
    if (config.dialect == Dialect::Gemini) {
        body["contents"] = json::array({{{"role", "user"}, {"parts", json::array({{{"text", request.user_text}}})}}});
        if (!request.system_text.empty()) {
            body["systemInstruction"] = {{"parts", json::array({{{"text", request.system_text}}})}};
        }
        body["generationConfig"] = {{"temperature", request.temperature},
                                    {"maxOutputTokens", request.max_output_tokens}};
    } else {
        json messages = json::array();
        if (!request.system_text.empty()) {
            messages.push_back({{"role", "system"}, {"content", request.system_text}});
        }
        messages.push_back({{"role", "user"}, {"content", request.user_text}});
        body["model"] = config.model_name;
        body["messages"] = std::move(messages);
        body["temperature"] = request.temperature;
        body["max_tokens"] = request.max_output_tokens;
    }
    return body.dump();
}

FailureKind HttpTransport::classify_status(int status) noexcept {
    if (status == 401 || status == 403) return FailureKind::Auth;
    if (status == 429) return FailureKind::RateLimited;
    if (status == 408) return FailureKind::Timeout;
    if (status >= 500) return FailureKind::Server;
    return FailureKind::Client;
}

std::optional<TransportReply> HttpTransport::parse_response(Dialect dialect, std::string_view body,
                                                            TransportFailure& failure) {
    json j;
    try {
        j = json::parse(body);
    } catch (const json::parse_error& e) {
        failure = {FailureKind::Protocol, 0, std::string("response is not JSON: ") + e.what(), std::nullopt};
        return std::nullopt;
    }
    TransportReply reply;
    try {
        if (dialect == Dialect::Gemini) {
            const auto& candidates = j.at("candidates");
            if (!candidates.is_array() || candidates.empty()) {
                failure = {FailureKind::Protocol, 0, "response has no candidates", std::nullopt};
                return std::nullopt;
            }
            for (const auto& part : candidates[0].at("content").at("parts")) {
                if (part.contains("text") && !part.value("thought", false)) {
                    reply.text += part.at("text").get<std::string>();
                }
            }
            if (auto it = j.find("usageMetadata"); it != j.end()) {
                if (it->contains("promptTokenCount")) reply.input_tokens = it->at("promptTokenCount").get<std::uint64_t>();
                if (it->contains("candidatesTokenCount"))
                    reply.output_tokens = it->at("candidatesTokenCount").get<std::uint64_t>();
            }
        } else {
            const auto& choices = j.at("choices");
            if (!choices.is_array() || choices.empty()) {
                failure = {FailureKind::Protocol, 0, "response has no choices", std::nullopt};
                return std::nullopt;
            }
            const auto& content = choices[0].at("message").at("content");
            reply.text = content.is_null() ? std::string() : content.get<std::string>();
            if (auto it = j.find("usage"); it != j.end()) {
                if (it->contains("prompt_tokens")) reply.input_tokens = it->at("prompt_tokens").get<std::uint64_t>();
                if (it->contains("completion_tokens"))
                    reply.output_tokens = it->at("completion_tokens").get<std::uint64_t>();
            }
        }
    } catch (const json::exception& e) {
        failure = {FailureKind::Protocol, 0, std::string("unexpected response shape: ") + e.what(), std::nullopt};
        return std::nullopt;
    }
    return reply;
}

std::optional<TransportReply> HttpTransport::send(const ChatRequest& request, TransportFailure& failure) {
    auto endpoint = split_url(config_.base_url);
    httplib::Client client(endpoint.origin);
    client.set_connection_timeout(30, 0);
    client.set_read_timeout(static_cast<time_t>(config_.timeout_s), 0);
    client.set_write_timeout(static_cast<time_t>(config_.timeout_s), 0);

    httplib::Headers headers;
    std::string path;
    if (config_.dialect == Dialect::Gemini) {
        path = endpoint.path + "/models/" + config_.model_name + ":generateContent";
        headers.emplace("x-goog-api-key", api_key_);
    } else {
        path = endpoint.path + "/chat/completions";
        headers.emplace("Authorization", "Bearer " + api_key_);
    }
    auto res = client.Post(path, headers, request_body(config_, request), "application/json");
    if (!res) {
        auto err = res.error();
        bool timeout = err == httplib::Error::ConnectionTimeout || err == httplib::Error::Read;
        failure = {timeout ? FailureKind::Timeout : FailureKind::Network, 0,
                   "transport error: " + httplib::to_string(err), std::nullopt};
        return std::nullopt;
    }
    if (res->status < 200 || res->status >= 300) {
        failure.kind = classify_status(res->status);
        failure.http_status = res->status;
        failure.message = "provider returned an error";
        if (res->has_header("Retry-After")) {
            try {
                failure.retry_after_ms = static_cast<std::uint32_t>(std::stoul(res->get_header_value("Retry-After")) * 1000);
            } catch (const std::exception&) {
            }
        }
        return std::nullopt;
    }
    return parse_response(config_.dialect, res->body, failure);
}

}  // namespace explcorpus
