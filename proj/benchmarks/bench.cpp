#include <benchmark/benchmark.h>

#include "support/generators.hpp"
#include "tmforge/attack_tree.hpp"
#include "tmforge/dsl.hpp"
#include "tmforge/stride.hpp"

using namespace tmforge;

namespace {

DfdLevel make_level(int scale) {
    tmftest::Rng rng(7);
    DfdLevel level;
    level.rank = 0;
    for (int i = 1; i <= scale; ++i) {
        level.elements.push_back(
            {"P" + std::to_string(i), ElementKind::Process, "process", false, {}, {}});
        level.elements.push_back(
            {"D" + std::to_string(i), ElementKind::DataStore, "store", i % 3 == 0, {}, {}});
    }
    int flow = 1;
    for (int i = 1; i < scale; ++i) {
        level.flows.push_back({"F" + std::to_string(flow++), "P" + std::to_string(i),
                               "P" + std::to_string(i + 1), "link", {}});
        level.flows.push_back({"F" + std::to_string(flow++), "P" + std::to_string(i),
                               "D" + std::to_string(i), "write", {}});
    }
    return level;
}

void BM_EnumerateThreats(benchmark::State& state) {
    const DfdLevel level = make_level(static_cast<int>(state.range(0)));
    const StrideRuleMatrix matrix = StrideRuleMatrix::standard();
    for (auto _ : state) {
        benchmark::DoNotOptimize(enumerate_threats(level, matrix));
    }
}
BENCHMARK(BM_EnumerateThreats)->Arg(16)->Arg(64)->Arg(256);

void BM_CutSets(benchmark::State& state) {
    tmftest::Rng rng(11);
    const AttackTree tree = tmftest::gen_attack_tree(rng, static_cast<int>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(enumerate_cut_sets(tree));
    }
}
BENCHMARK(BM_CutSets)->Arg(8)->Arg(12)->Arg(16);

void BM_ParseSerializeRoundTrip(benchmark::State& state) {
    tmftest::Rng rng(3);
    DfdModel model;
    model.title = "bench";
    model.levels.push_back(make_level(static_cast<int>(state.range(0))));
    refresh_derived(model);
    const std::string text = serialize_model(model);
    for (auto _ : state) {
        benchmark::DoNotOptimize(parse_model(text));
    }
}
BENCHMARK(BM_ParseSerializeRoundTrip)->Arg(16)->Arg(64)->Arg(256);

}  // namespace

BENCHMARK_MAIN();
