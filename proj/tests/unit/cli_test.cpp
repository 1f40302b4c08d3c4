#include "explcorpus/cli.hpp"

#include <explcorpus/analytics.hpp>
#include <explcorpus/records.hpp>

#include "support.hpp"

#include <gtest/gtest.h>
#include <json.hpp>

#include <map>
#include <sstream>

using namespace explcorpus;
using testsupport::TempDir;

namespace {

struct Run {
    int code = 0;
    std::string out;
    std::string err;
};

struct Cli {
    std::map<std::string, std::string> vars;
    std::shared_ptr<Transport> transport;

    Run operator()(std::vector<std::string> args) {
        std::ostringstream out;
        std::ostringstream err;
        cli::Environment env;
        env.out = &out;
        env.err = &err;
        env.getenv = [this](const std::string& k) -> std::optional<std::string> {
            auto it = vars.find(k);
            if (it == vars.end()) return std::nullopt;
            return it->second;
        };
        env.transport = transport;
        env.sleeper = [](std::chrono::milliseconds) {};
        Run r;
        r.code = cli::dispatch(args, env);
        r.out = out.str();
        r.err = err.str();
        return r;
    }
};

struct Workspace {
    TempDir dir;
    testsupport::Gen g{31};
    testsupport::OfflineCorpus corpus;
    BatchPlan plan;

    Workspace() {
        corpus = testsupport::write_offline_corpus(dir / "corpus", 50, g);
        save_manifest(corpus.manifest, dir / "manifest.jsonl");
        RunnerConfig cfg;
        plan = plan_batches(corpus.manifest, cfg);
        testsupport::write_stub_fixtures(dir / "fixtures", corpus, plan, 4, 2);
    }
    std::string p(const std::string& name) const { return (dir / name).string(); }
    std::vector<std::string> stub() const { return {"--provider", "stub", "--fixtures", p("fixtures")}; }
};

std::vector<std::string> cat(std::vector<std::string> a, const std::vector<std::string>& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
}

}  // namespace

TEST(Cli, UnknownCommandAndFlagPrintUsage) {
    Cli cli;
    auto r = cli({"bogus"});
    EXPECT_EQ(r.code, 1);
    EXPECT_NE((r.out + r.err).find("Usage"), std::string::npos);
    auto f = cli({"stats", "--nope"});
    EXPECT_EQ(f.code, 1);
    EXPECT_NE((f.out + f.err).find("--manifest"), std::string::npos);
    EXPECT_EQ(cli({}).code, 1);
}

TEST(Cli, EverySubcommandDocumentsItsFlags) {
    Cli cli;
    const std::map<std::vector<std::string>, std::vector<std::string>> expected = {
        {{"ingest"}, {"--source", "--metadata", "--extract-command", "--out"}},
        {{"sample"}, {"--manifest", "--n", "--seed", "--out"}},
        {{"annotate"}, {"--manifest", "--batch-size", "--resume", "--dry-run", "--context", "--provider", "--fixtures"}},
        {{"filter"}, {"--dir", "--passes", "--provider"}},
        {{"parse"}, {"--dir", "--out", "--raw"}},
        {{"verify"}, {"--dataset", "--manifest", "--threshold"}},
        {{"stats"}, {"--manifest", "--dataset", "--out", "--tiers"}},
        {{"query"}, {"--dataset", "--question", "--log"}},
        {{"export"}, {"--dataset", "--out"}},
        {{"prompts", "show"}, {"--kind", "--question"}},
    };
    for (const auto& [cmd, flags] : expected) {
        auto r = cli(cat(cmd, {"--help"}));
        EXPECT_EQ(r.code, 0) << cmd[0];
        for (const auto& f : flags) EXPECT_NE(r.out.find(f), std::string::npos) << cmd[0] << " " << f;
    }
}

TEST(Cli, PromptsListAndShow) {
    Cli cli;
    auto r = cli({"prompts", "list"});
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("annotation/persona"), std::string::npos);
    auto s = cli({"prompts", "show", "--kind", "annotation"});
    EXPECT_EQ(s.code, 0);
    EXPECT_EQ(s.out.substr(0, 200), build_annotation_prompt().text().substr(0, 200));
}

TEST(Cli, OfflinePipeline) {
    Workspace w;
    Cli cli;
    auto dry = cli(cat({"annotate", "--manifest", w.p("manifest.jsonl"), "--out", w.p("out"), "--dry-run"}, w.stub()));
    EXPECT_EQ(dry.code, 0) << dry.err;
    EXPECT_NE(dry.out.find("batch 1: 25 documents"), std::string::npos) << dry.out;
    EXPECT_FALSE(std::filesystem::exists(w.dir / "out" / "batch_0_output.txt"));

    auto a = cli(cat({"annotate", "--manifest", w.p("manifest.jsonl"), "--out", w.p("out")}, w.stub()));
    ASSERT_EQ(a.code, 0) << a.err;
    auto f = cli(cat({"filter", "--dir", w.p("out")}, w.stub()));
    ASSERT_EQ(f.code, 0) << f.err;
    auto p = cli({"parse", "--dir", w.p("out"), "--out", w.p("ds.jsonl"), "--manifest", w.p("manifest.jsonl")});
    ASSERT_EQ(p.code, 0) << p.err;
    auto ds = load_dataset(w.dir / "ds.jsonl").dataset;
    EXPECT_EQ(ds.records.size(), 4u);
    EXPECT_EQ(ds.filter_pass_count, 1u);

    auto v = cli({"verify", "--dataset", w.p("ds.jsonl"), "--manifest", w.p("manifest.jsonl"), "--summary-json",
                  w.p("summary.json")});
    ASSERT_EQ(v.code, 0) << v.err;
    auto verified = load_dataset(w.dir / "ds.jsonl").dataset;
    for (const auto& r : verified.records) {
        ASSERT_TRUE(r.verification);
        EXPECT_TRUE(r.verification->matched);
    }
    auto summary = nlohmann::json::parse(testsupport::read_file(w.dir / "summary.json"));
    EXPECT_EQ(summary["verified"], 4);

    auto s = cli({"stats", "--manifest", w.p("manifest.jsonl"), "--dataset", w.p("ds.jsonl"), "--out", w.p("stats")});
    ASSERT_EQ(s.code, 0) << s.err;
    EXPECT_TRUE(std::filesystem::exists(w.dir / "stats" / "report.txt"));
    EXPECT_NE(testsupport::read_file(w.dir / "stats" / "report.txt").find("Contributing papers: 2 of 50"),
              std::string::npos);

    auto e = cli({"export", "--dataset", w.p("ds.jsonl"), "--out", w.p("ds.md")});
    ASSERT_EQ(e.code, 0) << e.err;
    EXPECT_EQ(testsupport::read_file(w.dir / "ds.md"), export_document(verified));

    testsupport::write_file(w.dir / "fixtures" / (stub_fixture_key(PromptKind::Query, {"ds.jsonl"}) + ".txt"), "answer text\n");
    auto q = cli(cat({"query", "--dataset", w.p("ds.jsonl"), "--question", "what is there?"}, w.stub()));
    ASSERT_EQ(q.code, 0) << q.err;
    EXPECT_NE(q.out.find("answer text"), std::string::npos);
    EXPECT_TRUE(std::filesystem::exists(w.dir / "ds.jsonl.queries.jsonl"));

    auto again = cli(cat({"annotate", "--manifest", w.p("manifest.jsonl"), "--out", w.p("out"), "--resume"}, w.stub()));
    EXPECT_EQ(again.code, 0) << again.err;
}

TEST(Cli, PartialFailureExitsTwo) {
    Workspace w;
    testsupport::write_file(w.dir / "fixtures" / (stub_fixture_key(PromptKind::Annotation, w.plan.jobs[1].doc_ids) + ".fail"),
                            "permanent");
    Cli cli;
    auto r = cli(cat({"annotate", "--manifest", w.p("manifest.jsonl"), "--out", w.p("out"), "--max-retries", "1"}, w.stub()));
    EXPECT_EQ(r.code, 2) << r.err;
    EXPECT_TRUE(std::filesystem::exists(w.dir / "out" / "batch_0_output.txt"));
}

TEST(Cli, InjectedTransportAndAuthFailure) {
    Workspace w;
    auto stub = std::make_shared<StubTransport>();
    for (const auto& job : w.plan.jobs) {
        stub->fail_always(stub_fixture_key(PromptKind::Annotation, job.doc_ids),
                          {FailureKind::Auth, 401, "bad key", std::nullopt});
    }
    Cli cli;
    cli.transport = stub;
    auto r = cli({"annotate", "--manifest", w.p("manifest.jsonl"), "--out", w.p("out")});
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("credentials"), std::string::npos);
}

TEST(Cli, ConfigFileAndEnvironment) {
    Workspace w;
    nlohmann::json cfg = {{"provider", {{"dialect", "stub"}, {"fixtures_dir", w.p("fixtures")}}},
                          {"runner", {{"batch_size", 10}}}};
    testsupport::write_file(w.dir / "cfg.json", cfg.dump());
    Cli cli;
    auto r = cli({"annotate", "--manifest", w.p("manifest.jsonl"), "--out", w.p("out"), "--dry-run", "--config", w.p("cfg.json")});
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("batch 4:"), std::string::npos) << r.out;

    cli.vars[cli::kConfigEnvVar] = w.p("cfg.json");
    auto e = cli({"annotate", "--manifest", w.p("manifest.jsonl"), "--out", w.p("out"), "--dry-run", "--batch-size", "25"});
    EXPECT_EQ(e.code, 0) << e.err;
    EXPECT_EQ(e.out.find("batch 2:"), std::string::npos) << e.out;

    testsupport::write_file(w.dir / "bad.json", R"({"provider":{"nonsense":1}})");
    auto b = cli({"stats", "--manifest", w.p("manifest.jsonl"), "--dataset", w.p("x.jsonl"), "--out", w.p("s"),
                  "--config", w.p("bad.json")});
    EXPECT_EQ(b.code, 1);
}

TEST(Cli, MissingInputsAreUserErrors) {
    Workspace w;
    Cli cli;
    auto r = cli({"stats", "--manifest", w.p("nope.jsonl"), "--dataset", w.p("x.jsonl"), "--out", w.p("s")});
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("nope.jsonl"), std::string::npos);
    auto s = cli({"sample", "--manifest", w.p("manifest.jsonl"), "--n", "10", "--seed", "3", "--out", w.p("s.jsonl")});
    EXPECT_EQ(s.code, 0) << s.err;
    EXPECT_EQ(load_manifest(w.dir / "s.jsonl").size(), 10u);
    EXPECT_EQ(cli({"sample", "--manifest", w.p("manifest.jsonl"), "--n", "10", "--out", w.p("s.jsonl")}).code, 1);
}
