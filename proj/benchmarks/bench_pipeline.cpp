#include <explcorpus/records.hpp>
#include <explcorpus/runner.hpp>

#include <benchmark/benchmark.h>

#include <cstdio>

namespace {

explcorpus::CorpusManifest manifest(std::size_t n) {
    std::vector<explcorpus::DocumentRef> docs;
    char id[32];
    for (std::size_t i = 0; i < n; ++i) {
        std::snprintf(id, sizeof id, "doc%05zu", i);
        explcorpus::DocumentRef d;
        d.doc_id = id;
        d.title = "Title";
        d.char_count = 30'000 + (i * 7919) % 50'000;
        docs.push_back(std::move(d));
    }
    return explcorpus::CorpusManifest(std::move(docs));
}

explcorpus::ExampleRecord record(std::size_t i) {
    explcorpus::ExampleRecord r;
    r.source_doc_id = "math" + std::to_string(1000000 + i);
    r.title = "On the structure of orbit sets";
    r.authors = "A. Author";
    r.finding = "An analogy with topology explains an algebraic structure.";
    r.quote = "This gives a topological explanation why one has a group structure on the orbit set.";
    r.page = static_cast<int>(i % 40 + 1);
    r.commentary = "The author calls the connection an explanation.";
    r.batch_index = static_cast<std::uint32_t>(i / 10);
    return r;
}

void BM_PlanBatches(benchmark::State& state) {
    auto m = manifest(static_cast<std::size_t>(state.range(0)));
    explcorpus::RunnerConfig cfg;
    explcorpus::BatchBudget budget{1'000'000, 65'536, 20'000};
    for (auto _ : state) {
        benchmark::DoNotOptimize(explcorpus::plan_batches(m, cfg, budget));
    }
}
BENCHMARK(BM_PlanBatches)->Arg(5000)->Arg(80000);

void BM_ParseBatchOutput(benchmark::State& state) {
    std::vector<explcorpus::ExampleRecord> recs;
    for (int i = 0; i < state.range(0); ++i) recs.push_back(record(static_cast<std::size_t>(i)));
    auto text = explcorpus::render_records(recs);
    for (auto _ : state) {
        benchmark::DoNotOptimize(explcorpus::parse_batch_output(text, 0));
    }
    state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * text.size()));
}
BENCHMARK(BM_ParseBatchOutput)->Arg(10)->Arg(100);

void BM_DatasetRoundTrip(benchmark::State& state) {
    explcorpus::Dataset ds;
    for (int i = 0; i < state.range(0); ++i) ds.records.push_back(record(static_cast<std::size_t>(i)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(explcorpus::dataset_from_jsonl(explcorpus::dataset_to_jsonl(ds)));
    }
}
BENCHMARK(BM_DatasetRoundTrip)->Arg(2000);

}  // namespace

BENCHMARK_MAIN();
