#include "detail/fs_util.hpp"
#include "detail/hash.hpp"
#include "explcorpus/error.hpp"
#include "explcorpus/provider.hpp"

#include <algorithm>
#include <thread>

namespace explcorpus {

namespace fs = std::filesystem;

std::string stub_fixture_key(PromptKind kind, std::vector<std::string> payload_refs) {
    std::sort(payload_refs.begin(), payload_refs.end());
    std::string material(to_string(kind));
    for (const auto& ref : payload_refs) {
        material += '\n';
        material += ref;
    }
    return detail::sha256_hex(material).substr(0, 16);
}

StubTransport::StubTransport(fs::path fixtures_dir) : dir_(std::move(fixtures_dir)) {}

void StubTransport::script_failures(const std::string& key, int count, TransportFailure failure) {
    std::lock_guard lock(mutex_);
    scripted_[key] = count;
    scripted_failure_[key] = std::move(failure);
}

void StubTransport::fail_always(const std::string& key, TransportFailure failure) {
    std::lock_guard lock(mutex_);
    permanent_[key] = std::move(failure);
}

void StubTransport::set_reply(const std::string& key, std::string text) {
    std::lock_guard lock(mutex_);
    replies_[key] = std::move(text);
}

std::vector<ChatRequest> StubTransport::requests() const {
    std::lock_guard lock(mutex_);
    return log_;
}

std::optional<TransportReply> StubTransport::send(const ChatRequest& request, TransportFailure& failure) {
    int now = ++inflight_;
    for (int seen = high_water_.load(); now > seen && !high_water_.compare_exchange_weak(seen, now);) {
    }
    struct Leave {
        std::atomic<int>& n;
        ~Leave() { --n; }
    } leave{inflight_};
    ++calls_;
    for (auto seen = max_tokens_seen_.load();
         request.estimated_input_tokens > seen &&
         !max_tokens_seen_.compare_exchange_weak(seen, request.estimated_input_tokens);) {
    }
    if (latency_.count() > 0) {
        std::this_thread::sleep_for(latency_);
    }

    const auto key = stub_fixture_key(request.kind, request.payload_refs);
    std::optional<std::string> reply;
    {
        std::lock_guard lock(mutex_);
        log_.push_back(request);
        if (auto it = permanent_.find(key); it != permanent_.end()) {
            failure = it->second;
            return std::nullopt;
        }
        if (auto it = scripted_.find(key); it != scripted_.end() && it->second > 0) {
            --it->second;
            failure = scripted_failure_[key];
            return std::nullopt;
        }
        if (!dir_.empty()) {
            std::error_code ec;
            auto fail_file = dir_ / (key + ".fail");
            if (fs::exists(fail_file, ec)) {
                auto spec = detail::read_file(fail_file);
                spec.erase(std::remove_if(spec.begin(), spec.end(), [](unsigned char c) { return std::isspace(c); }),
                           spec.end());
                int& seen = file_failures_seen_[key];
                if (spec == "permanent" || seen < std::atoi(spec.c_str())) {
                    ++seen;
                    failure = {FailureKind::Server, 503, "fixture-scripted failure", std::nullopt};
                    return std::nullopt;
                }
            }
        }
        if (auto it = replies_.find(key); it != replies_.end()) {
            reply = it->second;
        }
    }
    if (!reply && !dir_.empty()) {
        std::error_code ec;
        for (const auto& candidate : {dir_ / (key + ".txt"), dir_ / "default.txt"}) {
            if (fs::is_regular_file(candidate, ec)) {
                reply = detail::read_file(candidate);
                break;
            }
        }
    }
    if (!reply) {
        failure = {FailureKind::Client, 404, "no stub fixture for key " + key, std::nullopt};
        return std::nullopt;
    }
    return TransportReply{*reply, std::nullopt, std::nullopt};
}

}  // namespace explcorpus
