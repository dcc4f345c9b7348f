#include <benchmark/benchmark.h>

#include <random>

#include "iotphy/channel/channel.hpp"
#include "iotphy/lora/demodulator.hpp"
#include "iotphy/lora/modulator.hpp"
#include "iotphy/lora/ser.hpp"

using namespace iotphy;

namespace {

lora::LoraParams params(int sf, int osr) {
    lora::LoraParams p;
    p.sf = sf;
    p.bw_hz = 125000.0;
    p.osr = osr;
    return p;
}

lora::LoraFrame frame(const lora::LoraParams& p, std::size_t n) {
    std::mt19937_64 rng(1);
    lora::LoraFrame f;
    f.params = p;
    for (std::size_t k = 0; k < n; ++k) f.symbols.push_back(static_cast<std::uint32_t>(rng() % p.chips()));
    return f;
}

}  // namespace

static void BM_ChirpGen(benchmark::State& state) {
    const auto p = params(static_cast<int>(state.range(0)), 1);
    for (auto _ : state) benchmark::DoNotOptimize(lora::chirp_gen(p, 37, lora::ChirpDirection::up));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(p.samples_per_symbol()));
}
BENCHMARK(BM_ChirpGen)->DenseRange(7, 12, 5);

static void BM_DemodSymbol(benchmark::State& state) {
    const auto p = params(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
    lora::SymbolDemodulator demod(p);
    const auto noisy = channel::awgn(lora::chirp_gen(p, 5, lora::ChirpDirection::up), 0.0, 2);
    for (auto _ : state) benchmark::DoNotOptimize(demod.demod(noisy.samples, lora::ChirpDirection::up));
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_DemodSymbol)->ArgsProduct({{7, 10, 12}, {1, 4}});

static void BM_DemodulateFrame(benchmark::State& state) {
    const auto p = params(static_cast<int>(state.range(0)), 2);
    const auto buf = lora::modulate_frame(frame(p, 100));
    for (auto _ : state) benchmark::DoNotOptimize(lora::demodulate_frame(buf, p));
    state.SetItemsProcessed(state.iterations() * 100);
}
BENCHMARK(BM_DemodulateFrame)->Arg(7)->Arg(10)->Unit(benchmark::kMillisecond);

static void BM_MeasureSer(benchmark::State& state) {
    const auto p = params(8, 1);
    for (auto _ : state) benchmark::DoNotOptimize(lora::measure_ser(p, -10.0, 1000, 3));
    state.SetItemsProcessed(state.iterations() * 1000);
}
BENCHMARK(BM_MeasureSer)->Unit(benchmark::kMillisecond);
