#include <explcorpus/normalize.hpp>
#include <explcorpus/verify.hpp>

#include <benchmark/benchmark.h>

#include <random>
#include <string>

namespace {

std::string words(std::size_t n, std::uint64_t seed) {
    static const char* kWords[] = {"group", "orbit", "explanation", "homotopy", "the", "of", "structure",
                                   "proof", "lemma", "we", "show", "that", "is", "a", "map", "class"};
    std::mt19937_64 rng(seed);
    std::string out;
    for (std::size_t i = 0; i < n; ++i) {
        if (i) out += (rng() % 9 == 0) ? ".\n" : " ";
        out += kWords[rng() % 16];
    }
    return out;
}

void BM_NormalizeDocument(benchmark::State& state) {
    auto text = words(static_cast<std::size_t>(state.range(0)), 1);
    for (auto _ : state) {
        benchmark::DoNotOptimize(explcorpus::normalize(text));
    }
    state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * text.size()));
}
BENCHMARK(BM_NormalizeDocument)->Arg(1000)->Arg(10000)->Arg(100000);

void BM_BestMatchPlanted(benchmark::State& state) {
    explcorpus::PreparedText doc(words(static_cast<std::size_t>(state.range(0)), 2));
    std::string quote = words(30, 2).substr(0, 150);
    quote[10] = '#';
    quote[40] = '#';
    for (auto _ : state) {
        benchmark::DoNotOptimize(explcorpus::best_match(quote, doc, 0.85));
    }
}
BENCHMARK(BM_BestMatchPlanted)->Arg(1000)->Arg(10000)->Arg(50000)->Unit(benchmark::kMillisecond);

void BM_BestMatchFabricated(benchmark::State& state) {
    explcorpus::PreparedText doc(words(static_cast<std::size_t>(state.range(0)), 3));
    auto quote = words(25, 99);
    for (auto _ : state) {
        benchmark::DoNotOptimize(explcorpus::best_match(quote, doc, 0.85));
    }
}
BENCHMARK(BM_BestMatchFabricated)->Arg(1000)->Arg(10000)->Arg(50000)->Unit(benchmark::kMillisecond);

void BM_BestMatchExhaustive(benchmark::State& state) {
    explcorpus::PreparedText doc(words(static_cast<std::size_t>(state.range(0)), 4));
    auto quote = words(25, 98);
    explcorpus::MatchOptions opt;
    opt.exhaustive = true;
    for (auto _ : state) {
        benchmark::DoNotOptimize(explcorpus::best_match(quote, doc, 0.85, opt));
    }
}
BENCHMARK(BM_BestMatchExhaustive)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

}  // namespace
