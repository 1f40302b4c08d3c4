#include <explcorpus/error.hpp>
#include <explcorpus/provider.hpp>

#include "support.hpp"

#include <gtest/gtest.h>
#include <httplib.h>
#include <json.hpp>

#include <atomic>
#include <cstdlib>
#include <mutex>
#include <thread>

using namespace explcorpus;
using testsupport::TempDir;
using testsupport::write_file;

namespace {

struct SleepLog {
    std::mutex m;
    std::vector<std::chrono::milliseconds> delays;
    Sleeper sleeper() {
        return [this](std::chrono::milliseconds d) {
            std::lock_guard lock(m);
            delays.push_back(d);
        };
    }
};

ProviderConfig stub_config() {
    ProviderConfig c;
    c.dialect = Dialect::Stub;
    c.context_window_tokens = 100000;
    c.max_output_tokens = 1000;
    c.max_retries = 5;
    c.backoff_base_ms = 1000;
    return c;
}

PromptBundle bundle_for(std::vector<std::string> refs, PromptKind kind = PromptKind::Annotation) {
    PromptBundle b;
    b.kind = kind;
    b.persona = "persona";
    b.instructions = "instructions";
    b.payload_refs = std::move(refs);
    return b;
}

}  // namespace

TEST(ProviderConfig, Validation) {
    ProviderConfig c;
    EXPECT_NO_THROW(c.validate());
    c.context_window_tokens = 10;
    c.max_output_tokens = 11;
    EXPECT_THROW(c.validate(), std::invalid_argument);
    c = ProviderConfig{};
    c.max_inflight = 0;
    EXPECT_THROW(c.validate(), std::invalid_argument);
    c = ProviderConfig{};
    c.max_retries = -1;
    EXPECT_THROW(c.validate(), std::invalid_argument);
    EXPECT_EQ(ProviderConfig{}.context_window_tokens, 1'000'000u);
}

TEST(Dialects, Names) {
    for (auto d : {Dialect::Gemini, Dialect::OpenAI, Dialect::Stub}) EXPECT_EQ(parse_dialect(to_string(d)), d);
    EXPECT_FALSE(parse_dialect("claude").has_value());
}

TEST(StubFixtureKey, StableAndOrderInsensitive) {
    auto a = stub_fixture_key(PromptKind::Annotation, {"b", "a"});
    EXPECT_EQ(a, stub_fixture_key(PromptKind::Annotation, {"a", "b"}));
    EXPECT_NE(a, stub_fixture_key(PromptKind::Filter, {"a", "b"}));
    EXPECT_EQ(a.size(), 16u);
    // sha256("annotation\na\nb") prefix, computed independently.
    EXPECT_EQ(a, "8720cc5f61d99472");
}

TEST(Complete, StubFixtureReply) {
    TempDir dir;
    const auto key = stub_fixture_key(PromptKind::Annotation, {"doc1", "doc2"});
    write_file(dir / (key + ".txt"), "canned reply");
    auto stub = std::make_shared<StubTransport>(dir.path());
    ChatClient client(stub_config(), stub);
    auto r = client.complete(bundle_for({"doc2", "doc1"}), "payload");
    EXPECT_EQ(r.text, "canned reply");
    EXPECT_EQ(r.attempts, 1);
    EXPECT_GT(r.input_tokens, 0u);
    EXPECT_EQ(client.complete(bundle_for({"doc1", "doc2"}), "payload").text, r.text);
}

TEST(Complete, DefaultFixtureAndMissingFixture) {
    TempDir dir;
    auto stub = std::make_shared<StubTransport>(dir.path());
    ChatClient client(stub_config(), stub);
    EXPECT_THROW(client.complete(bundle_for({"x"})), ProviderError);
    EXPECT_EQ(stub->calls(), 1u);
    write_file(dir / "default.txt", "fallback");
    EXPECT_EQ(client.complete(bundle_for({"x"})).text, "fallback");
}

TEST(Complete, ContextOverflowBeforeAnyCall) {
    auto stub = std::make_shared<StubTransport>();
    auto cfg = stub_config();
    cfg.context_window_tokens = 1100;
    cfg.max_output_tokens = 1000;
    ChatClient client(cfg, stub);
    try {
        client.complete(bundle_for({"x"}), std::string(1000, 'a'));
        FAIL();
    } catch (const ContextOverflow& e) {
        EXPECT_EQ(e.available_tokens(), 1100u);
        EXPECT_GT(e.required_tokens(), 1100u);
    }
    EXPECT_EQ(stub->calls(), 0u);
    EXPECT_EQ(client.calls(), 0u);
}

TEST(Complete, RetriesTransientFailures) {
    auto stub = std::make_shared<StubTransport>();
    const auto key = stub_fixture_key(PromptKind::Annotation, {"x"});
    stub->set_reply(key, "finally");
    stub->script_failures(key, 2);
    SleepLog log;
    ChatClient client(stub_config(), stub, log.sleeper());
    auto r = client.complete(bundle_for({"x"}));
    EXPECT_EQ(r.text, "finally");
    EXPECT_EQ(r.attempts, 3);
    ASSERT_EQ(log.delays.size(), 2u);
    EXPECT_GE(log.delays[0].count(), 750);
    EXPECT_LE(log.delays[0].count(), 1250);
    EXPECT_GE(log.delays[1].count(), 1500);
    EXPECT_LE(log.delays[1].count(), 2500);
}

TEST(Complete, FixtureScriptedFailures) {
    TempDir dir;
    const auto key = stub_fixture_key(PromptKind::Filter, {"batch_0_output.txt"});
    write_file(dir / (key + ".txt"), "ok");
    write_file(dir / (key + ".fail"), "2\n");
    SleepLog log;
    ChatClient client(stub_config(), std::make_shared<StubTransport>(dir.path()), log.sleeper());
    EXPECT_EQ(client.complete(bundle_for({"batch_0_output.txt"}, PromptKind::Filter)).attempts, 3);
}

TEST(Complete, ExhaustedRetriesCarriesLastError) {
    auto stub = std::make_shared<StubTransport>();
    const auto key = stub_fixture_key(PromptKind::Annotation, {"x"});
    stub->fail_always(key, {FailureKind::Server, 502, "bad gateway", std::nullopt});
    SleepLog log;
    auto cfg = stub_config();
    cfg.max_retries = 3;
    ChatClient client(cfg, stub, log.sleeper());
    try {
        client.complete(bundle_for({"x"}));
        FAIL();
    } catch (const ExhaustedRetries& e) {
        EXPECT_EQ(e.attempts(), 4);
        EXPECT_NE(e.last_error().find("bad gateway"), std::string::npos);
    }
    EXPECT_EQ(stub->calls(), 4u);
    EXPECT_EQ(log.delays.size(), 3u);
}

TEST(Complete, AuthFailureIsNotRetried) {
    auto stub = std::make_shared<StubTransport>();
    stub->fail_always(stub_fixture_key(PromptKind::Annotation, {"x"}), {FailureKind::Auth, 401, "denied", std::nullopt});
    ChatClient client(stub_config(), stub, SleepLog{}.sleeper());
    EXPECT_THROW(client.complete(bundle_for({"x"})), AuthError);
    EXPECT_EQ(stub->calls(), 1u);
}

TEST(Complete, NonTransientClientErrorIsProviderError) {
    auto stub = std::make_shared<StubTransport>();
    stub->fail_always(stub_fixture_key(PromptKind::Annotation, {"x"}), {FailureKind::Client, 400, "bad", std::nullopt});
    ChatClient client(stub_config(), stub);
    EXPECT_THROW(client.complete(bundle_for({"x"})), ProviderError);
    EXPECT_EQ(stub->calls(), 1u);
}

TEST(Backoff, ExponentialCappedAndRetryAfter) {
    auto cfg = stub_config();
    ChatClient client(cfg, std::make_shared<StubTransport>());
    EXPECT_EQ(client.base_delay(0).count(), 1000);
    EXPECT_EQ(client.base_delay(3).count(), 8000);
    EXPECT_EQ(client.base_delay(10).count(), 60000);

    auto stub = std::make_shared<StubTransport>();
    const auto key = stub_fixture_key(PromptKind::Annotation, {"x"});
    stub->set_reply(key, "ok");
    stub->script_failures(key, 1, {FailureKind::RateLimited, 429, "slow down", 7000u});
    SleepLog log;
    ChatClient c2(cfg, stub, log.sleeper());
    c2.complete(bundle_for({"x"}));
    ASSERT_EQ(log.delays.size(), 1u);
    EXPECT_EQ(log.delays[0].count(), 7000);

    stub->script_failures(key, 1, {FailureKind::RateLimited, 429, "slow down", 600000u});
    c2.complete(bundle_for({"x"}));
    EXPECT_EQ(log.delays.back().count(), 60000);
}

TEST(Concurrency, InflightLimitHolds) {
    auto stub = std::make_shared<StubTransport>();
    stub->set_latency(std::chrono::milliseconds(15));
    for (int i = 0; i < 24; ++i) stub->set_reply(stub_fixture_key(PromptKind::Annotation, {std::to_string(i)}), "r");
    auto cfg = stub_config();
    cfg.max_inflight = 3;
    ChatClient client(cfg, stub);
    std::vector<std::thread> threads;
    for (int i = 0; i < 24; ++i) {
        threads.emplace_back([&, i] { client.complete(bundle_for({std::to_string(i)})); });
    }
    for (auto& t : threads) t.join();
    EXPECT_EQ(stub->calls(), 24u);
    EXPECT_LE(stub->max_concurrent(), 3);
    EXPECT_GE(stub->max_concurrent(), 2);
}

TEST(Budget, NoIssuedRequestExceedsWindow) {
    auto stub = std::make_shared<StubTransport>();
    stub->set_reply(stub_fixture_key(PromptKind::Annotation, {"x"}), "ok");
    auto cfg = stub_config();
    cfg.context_window_tokens = 5000;
    cfg.max_output_tokens = 2000;
    ChatClient client(cfg, stub);
    testsupport::Gen g(4);
    std::uint64_t issued = 0;
    for (int i = 0; i < 300; ++i) {
        std::string payload(g.below(20000), 'p');
        try {
            client.complete(bundle_for({"x"}), payload);
            ++issued;
        } catch (const ContextOverflow&) {
        }
    }
    EXPECT_EQ(stub->calls(), issued);
    EXPECT_GT(issued, 0u);
    EXPECT_LE(stub->max_request_tokens() + cfg.max_output_tokens, cfg.context_window_tokens);
}

TEST(Messages, CombinedByDefaultSplitOnRequest) {
    auto stub = std::make_shared<StubTransport>();
    stub->set_reply(stub_fixture_key(PromptKind::Annotation, {"x"}), "ok");
    auto cfg = stub_config();
    ChatClient combined(cfg, stub);
    combined.complete(bundle_for({"x"}), "PAYLOAD");
    cfg.system_message = true;
    ChatClient split(cfg, stub);
    split.complete(bundle_for({"x"}), "PAYLOAD");
    auto reqs = stub->requests();
    ASSERT_EQ(reqs.size(), 2u);
    EXPECT_TRUE(reqs[0].system_text.empty());
    EXPECT_EQ(reqs[0].user_text, "persona\n\ninstructions\n\nPAYLOAD");
    EXPECT_EQ(reqs[1].system_text, "persona\n\ninstructions");
    EXPECT_EQ(reqs[1].user_text, "PAYLOAD");
    EXPECT_GE(reqs[1].estimated_input_tokens + 1, reqs[0].estimated_input_tokens);
    EXPECT_DOUBLE_EQ(reqs[0].temperature, 0.0);
}

TEST(Audit, SecretIsRedacted) {
    ::setenv("EXPLCORPUS_TEST_AUDIT_KEY", "sk-secret-123", 1);
    TempDir dir;
    auto stub = std::make_shared<StubTransport>();
    stub->set_reply(stub_fixture_key(PromptKind::Annotation, {"x"}), "reply mentions sk-secret-123");
    auto cfg = stub_config();
    cfg.api_key_env = "EXPLCORPUS_TEST_AUDIT_KEY";
    cfg.audit_log = dir / "audit.jsonl";
    ChatClient client(cfg, stub);
    client.complete(bundle_for({"x"}), "payload with sk-secret-123 inside");
    auto log = testsupport::read_file(dir / "audit.jsonl");
    EXPECT_EQ(log.find("sk-secret-123"), std::string::npos);
    EXPECT_NE(log.find("[REDACTED]"), std::string::npos);
    EXPECT_EQ(std::count(log.begin(), log.end(), '\n'), 1);
}

TEST(HttpTransport, RequestBodies) {
    ChatRequest r;
    r.user_text = "hello";
    r.system_text = "sys";
    r.max_output_tokens = 77;
    r.temperature = 0.5;
    ProviderConfig g;
    auto gj = nlohmann::json::parse(HttpTransport::request_body(g, r));
    EXPECT_EQ(gj["contents"][0]["role"], "user");
    EXPECT_EQ(gj["contents"][0]["parts"][0]["text"], "hello");
    EXPECT_EQ(gj["systemInstruction"]["parts"][0]["text"], "sys");
    EXPECT_EQ(gj["generationConfig"]["maxOutputTokens"], 77);
    ProviderConfig o;
    o.dialect = Dialect::OpenAI;
    o.model_name = "gpt-x";
    auto oj = nlohmann::json::parse(HttpTransport::request_body(o, r));
    EXPECT_EQ(oj["model"], "gpt-x");
    EXPECT_EQ(oj["messages"][0]["role"], "system");
    EXPECT_EQ(oj["messages"][1]["content"], "hello");
    EXPECT_EQ(oj["max_tokens"], 77);
}

TEST(HttpTransport, ParseResponses) {
    TransportFailure f;
    auto g = HttpTransport::parse_response(
        Dialect::Gemini,
        R"({"candidates":[{"content":{"parts":[{"text":"a"},{"text":"hidden","thought":true},{"text":"b"}]}}],
            "usageMetadata":{"promptTokenCount":10,"candidatesTokenCount":2}})",
        f);
    ASSERT_TRUE(g);
    EXPECT_EQ(g->text, "ab");
    EXPECT_EQ(g->input_tokens, 10u);
    auto o = HttpTransport::parse_response(
        Dialect::OpenAI, R"({"choices":[{"message":{"content":"hi"}}],"usage":{"prompt_tokens":3,"completion_tokens":1}})", f);
    ASSERT_TRUE(o);
    EXPECT_EQ(o->text, "hi");
    EXPECT_FALSE(HttpTransport::parse_response(Dialect::OpenAI, "not json", f));
    EXPECT_EQ(f.kind, FailureKind::Protocol);
    EXPECT_FALSE(HttpTransport::parse_response(Dialect::Gemini, R"({"candidates":[]})", f));
    EXPECT_FALSE(HttpTransport::parse_response(Dialect::OpenAI, R"({"choices":[{}]})", f));
}

TEST(HttpTransport, StatusClassification) {
    EXPECT_EQ(HttpTransport::classify_status(401), FailureKind::Auth);
    EXPECT_EQ(HttpTransport::classify_status(403), FailureKind::Auth);
    EXPECT_EQ(HttpTransport::classify_status(429), FailureKind::RateLimited);
    EXPECT_EQ(HttpTransport::classify_status(503), FailureKind::Server);
    EXPECT_EQ(HttpTransport::classify_status(400), FailureKind::Client);
    EXPECT_TRUE(is_transient(FailureKind::Timeout));
    EXPECT_FALSE(is_transient(FailureKind::Protocol));
}

TEST(HttpTransport, MissingKeyIsAuthError) {
    ProviderConfig c;
    c.api_key_env = "EXPLCORPUS_TEST_UNSET_KEY_VARIABLE";
    ::unsetenv(c.api_key_env.c_str());
    EXPECT_THROW(HttpTransport{c}, AuthError);
    EXPECT_THROW(make_transport(c), AuthError);
    c.dialect = Dialect::Stub;
    EXPECT_THROW(make_transport(c), std::invalid_argument);
}

namespace {

class LocalServer {
  public:
    LocalServer() {
        port_ = server_.bind_to_any_port("127.0.0.1");
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
    }
    ~LocalServer() {
        server_.stop();
        thread_.join();
    }
    httplib::Server& server() { return server_; }
    std::string url(const std::string& prefix) const { return "http://127.0.0.1:" + std::to_string(port_) + prefix; }

  private:
    httplib::Server server_;
    int port_ = 0;
    std::thread thread_;
};

}  // namespace

TEST(HttpTransport, TalksToLocalServers) {
    ::setenv("EXPLCORPUS_TEST_HTTP_KEY", "k-123", 1);
    LocalServer srv;
    std::atomic<int> gemini_hits{0};
    std::atomic<int> openai_hits{0};
    srv.server().Post("/v1beta/models/test-model:generateContent", [&](const httplib::Request& req, httplib::Response& res) {
        if (req.get_header_value("x-goog-api-key") != "k-123") {
            res.status = 401;
            return;
        }
        if (gemini_hits++ == 0) {
            res.status = 503;
            res.set_header("Retry-After", "1");
            return;
        }
        auto body = nlohmann::json::parse(req.body);
        std::string echo = body["contents"][0]["parts"][0]["text"];
        res.set_content(R"({"candidates":[{"content":{"parts":[{"text":"echo: )" + echo + R"("}]}}]})",
                        "application/json");
    });
    srv.server().Post("/v1/chat/completions", [&](const httplib::Request& req, httplib::Response& res) {
        ++openai_hits;
        if (req.get_header_value("Authorization") != "Bearer k-123") {
            res.status = 403;
            return;
        }
        res.set_content(R"({"choices":[{"message":{"content":"openai ok"}}]})", "application/json");
    });

    ProviderConfig g;
    g.base_url = srv.url("/v1beta");
    g.model_name = "test-model";
    g.api_key_env = "EXPLCORPUS_TEST_HTTP_KEY";
    SleepLog log;
    ChatClient gemini(g, make_transport(g), log.sleeper());
    PromptBundle b;
    b.instructions = "ping";
    auto r = gemini.complete(b);
    EXPECT_EQ(r.text, "echo: ping");
    EXPECT_EQ(r.attempts, 2);
    ASSERT_EQ(log.delays.size(), 1u);
    EXPECT_GE(log.delays[0].count(), 1000);

    ProviderConfig o;
    o.dialect = Dialect::OpenAI;
    o.base_url = srv.url("/v1");
    o.api_key_env = "EXPLCORPUS_TEST_HTTP_KEY";
    ChatClient openai(o, make_transport(o));
    EXPECT_EQ(openai.complete(b).text, "openai ok");

    ::setenv("EXPLCORPUS_TEST_HTTP_KEY", "wrong", 1);
    ChatClient denied(o, make_transport(o));
    EXPECT_THROW(denied.complete(b), AuthError);
    EXPECT_EQ(openai_hits.load(), 2);
}
