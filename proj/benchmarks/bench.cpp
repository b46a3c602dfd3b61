#include <benchmark/benchmark.h>

#include <vector>

#include "actsim/engine.hpp"
#include "actsim/eventlink.hpp"
#include "actsim/harness.hpp"
#include "actsim/mtg.hpp"
#include "actsim/rtdl.hpp"

using namespace actsim;

static void BM_EngineScheduleRun(benchmark::State& state) {
    const std::int64_t n = state.range(0);
    for (auto _ : state) {
        Engine e;
        for (std::int64_t i = 0; i < n; ++i)
            e.schedule({SimTime{i * 1000}, static_cast<std::uint8_t>(1 + i % 8), {}, "bench"});
        benchmark::DoNotOptimize(e.run_until(SimTime{n * 1000}));
    }
    state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_EngineScheduleRun)->Arg(1'000)->Arg(10'000);

static void BM_BiphaseEncode(benchmark::State& state) {
    std::vector<LinkEvent> evs;
    for (int i = 0; i < 50; ++i) evs.push_back({i * 20, codes::CycleStart});
    const RationalPs cell{945'388, 16};
    for (auto _ : state) benchmark::DoNotOptimize(encode(evs, cell));
    state.SetItemsProcessed(state.iterations() * 50);
}
BENCHMARK(BM_BiphaseEncode);

static void BM_BiphaseDecode(benchmark::State& state) {
    std::vector<LinkEvent> evs;
    for (int i = 0; i < 50; ++i) evs.push_back({i * 20, codes::Extraction});
    const Bitstream bs = encode(evs, RationalPs{945'388, 16});
    for (auto _ : state) benchmark::DoNotOptimize(decode(bs));
    state.SetItemsProcessed(state.iterations() * 50);
}
BENCHMARK(BM_BiphaseDecode);

static void BM_PllUpdate(benchmark::State& state) {
    GridConfig cfg;
    cfg.wander_sigma = 0.01;
    cfg.seed = 1;
    GridModel grid(cfg);
    PllState pll = make_pll(0.1, cfg.f_min, cfg.f_max, cfg.f_nominal);
    for (auto _ : state) {
        const PllOutput out = pll_update(pll, grid.next_zero_crossing());
        pll = out.state;
        benchmark::DoNotOptimize(out.reference);
    }
}
BENCHMARK(BM_PllUpdate);

static void BM_RtdlCodec(benchmark::State& state) {
    const RtdlFrame f{rtdl_addr::RingRevolutionPeriod, 945'388};
    for (auto _ : state) {
        const auto bytes = encode_frame(f);
        benchmark::DoNotOptimize(decode_frame(bytes));
    }
}
BENCHMARK(BM_RtdlCodec);

static void BM_RunScenario(benchmark::State& state) {
    Scenario sc = parse_scenario("{}");
    sc.cycles = state.range(0);
    sc.mtg.kappa = 1.0;
    for (auto _ : state) benchmark::DoNotOptimize(run_scenario(sc));
    state.SetItemsProcessed(state.iterations() * sc.cycles);
}
BENCHMARK(BM_RunScenario)->Arg(50);

BENCHMARK_MAIN();
