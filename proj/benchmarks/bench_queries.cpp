#include <benchmark/benchmark.h>

#include <map>
#include <random>

#include "grix/aggregates.hpp"
#include "grix/hardgen.hpp"
#include "grix/traversal.hpp"

using namespace grix;

namespace {

const grammar& hard_text() {
    static const grammar g = generate_hard(u64(1) << 24, 2000, 1, 0, 3).g;
    return g;
}

const grammar& fibonacci() {
    static const grammar g = [] {
        std::string s = "start: F30\nF1 -> 'b'\nF2 -> 'a'\n";
        for (int k = 3; k <= 30; ++k)
            s += "F" + std::to_string(k) + " -> F" + std::to_string(k - 1) + " F" + std::to_string(k - 2) + "\n";
        return parse_text(s);
    }();
    return g;
}

const access_index& index_for(const grammar& g, u64 tau, bool leafy) {
    static std::map<std::tuple<const grammar*, u64, bool>, access_index> cache;
    auto key = std::make_tuple(&g, tau, leafy);
    auto it = cache.find(key);
    if (it == cache.end()) {
        build_config cfg;
        cfg.tau = ratio::of(tau);
        cfg.leafy = leafy;
        it = cache.emplace(key, access_index::build(g, cfg)).first;
    }
    return it->second;
}

void access_queries(benchmark::State& st, const grammar& g) {
    const auto& ix = index_for(g, u64(st.range(0)), false);
    std::mt19937_64 rng(1);
    u64 steps = 0, n = 0;
    for (auto _ : st) {
        auto a = ix.access(rng() % ix.weight());
        benchmark::DoNotOptimize(a);
        steps += a.steps;
        ++n;
    }
    st.counters["bits"] = double(ix.bits());
    st.counters["steps"] = double(steps) / double(std::max<u64>(n, 1));
}

void BM_access_hard(benchmark::State& st) { access_queries(st, hard_text()); }
void BM_access_fibonacci(benchmark::State& st) { access_queries(st, fibonacci()); }
BENCHMARK(BM_access_hard)->Arg(2)->Arg(4)->Arg(16)->Arg(64)->Arg(256);
BENCHMARK(BM_access_fibonacci)->Arg(2)->Arg(4)->Arg(16)->Arg(64)->Arg(256);

void BM_extract(benchmark::State& st) {
    const auto& ix = index_for(fibonacci(), 4, true);
    traversal tr(ix);
    const u64 m = u64(st.range(0));
    std::mt19937_64 rng(2);
    for (auto _ : st) {
        auto s = tr.extract(rng() % (ix.length() - m), m);
        benchmark::DoNotOptimize(s);
    }
    st.SetBytesProcessed(int64_t(st.iterations()) * int64_t(m));
}
BENCHMARK(BM_extract)->Arg(16)->Arg(256)->Arg(4096);

void BM_rank(benchmark::State& st) {
    const auto& ix = index_for(fibonacci(), 4, false);
    static aggregate_index ai(ix, true);
    std::mt19937_64 rng(3);
    for (auto _ : st) benchmark::DoNotOptimize(ai.rank(0, rng() % ix.weight()));
}
BENCHMARK(BM_rank);

void BM_select(benchmark::State& st) {
    const auto& ix = index_for(fibonacci(), 4, false);
    static aggregate_index ai(ix, true);
    const u64 ones = ai.count(0);
    std::mt19937_64 rng(4);
    for (auto _ : st) benchmark::DoNotOptimize(ai.select(0, rng() % ones));
}
BENCHMARK(BM_select);

}  // namespace

BENCHMARK_MAIN();
