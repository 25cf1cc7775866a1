// Kernel-level timings. The bench subcommand of the CLI measures whole
// runs; these isolate the three hot loops so regressions can be pinned to
// a kernel before bisecting the pipeline.

#include <ddm/fft.hpp>
#include <ddm/pairwise.hpp>
#include <ddm/temporal.hpp>

#include <benchmark/benchmark.h>

#include <complex>
#include <cstdint>
#include <random>
#include <vector>

namespace {

std::vector<std::complex<double>> random_sequence(std::int64_t n, unsigned seed)
{
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    std::vector<std::complex<double>> seq(static_cast<std::size_t>(n));
    for (auto& v : seq)
        v = {dist(rng), dist(rng)};
    return seq;
}

void BM_SpatialTransform(benchmark::State& state)
{
    const int size = static_cast<int>(state.range(0));
    ddm::SpatialTransform<double> fft(size, size);
    std::mt19937 rng(1);
    std::uniform_real_distribution<double> dist(0.0, 65535.0);
    auto in = fft.input();
    for (auto& v : in)
        v = dist(rng);
    for (auto _ : state) {
        fft.run();
        benchmark::DoNotOptimize(fft.output().data());
    }
    state.SetItemsProcessed(state.iterations() * size * size);
}

void BM_SequenceWithFt(benchmark::State& state)
{
    const std::int64_t frames = state.range(0);
    ddm::SequenceEngine<double> engine(frames);
    const auto seq = random_sequence(frames, 2);
    for (auto _ : state) {
        auto profile = engine.with_ft(seq);
        benchmark::DoNotOptimize(profile.d.data());
    }
    state.SetItemsProcessed(state.iterations() * frames);
}

void BM_SequenceDirect(benchmark::State& state)
{
    const std::int64_t frames = state.range(0);
    const auto seq = random_sequence(frames, 3);
    for (auto _ : state) {
        auto profile = ddm::direct_sequence_oracle(seq);
        benchmark::DoNotOptimize(profile.d.data());
    }
    state.SetItemsProcessed(state.iterations() * frames);
}

void BM_AccumulateDifference(benchmark::State& state)
{
    const std::int64_t count = state.range(0);
    const auto earlier = random_sequence(count, 4);
    const auto later = random_sequence(count, 5);
    std::vector<std::int64_t> idx(static_cast<std::size_t>(count));
    for (std::int64_t i = 0; i < count; ++i)
        idx[static_cast<std::size_t>(i)] = i;
    std::vector<double> acc(static_cast<std::size_t>(count), 0.0);
    for (auto _ : state) {
        ddm::accumulate_difference<double>(earlier, later, idx, acc);
        benchmark::DoNotOptimize(acc.data());
    }
    state.SetItemsProcessed(state.iterations() * count);
}

} // namespace

BENCHMARK(BM_SpatialTransform)->Arg(64)->Arg(256)->Arg(512);
BENCHMARK(BM_SequenceWithFt)->Arg(256)->Arg(1024)->Arg(4096);
BENCHMARK(BM_SequenceDirect)->Arg(256)->Arg(1024);
BENCHMARK(BM_AccumulateDifference)->Arg(2112)->Arg(131584);

BENCHMARK_MAIN();
