#include <benchmark/benchmark.h>

#include <random>

#include "iotphy/ota/lz.hpp"
#include "iotphy/ota/session.hpp"

using namespace iotphy;

namespace {

// Firmware-like block: short repeated runs mixed with literals.
std::vector<std::uint8_t> sample_block() {
    std::mt19937_64 rng(7);
    std::vector<std::uint8_t> b;
    while (b.size() < ota::kMaxBlockSize) {
        if (rng() % 3 == 0 && b.size() > 64) {
            const std::size_t from = b.size() - 1 - rng() % 64;
            const std::size_t len = 4 + rng() % 16;
            for (std::size_t k = 0; k < len && b.size() < ota::kMaxBlockSize; ++k) b.push_back(b[from + k]);
        } else {
            b.push_back(static_cast<std::uint8_t>(rng() % 32));
        }
    }
    return b;
}

}  // namespace

static void BM_Compress(benchmark::State& state) {
    const auto block = sample_block();
    for (auto _ : state) benchmark::DoNotOptimize(ota::compress_block(block));
    state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(block.size()));
}
BENCHMARK(BM_Compress);

static void BM_Decompress(benchmark::State& state) {
    const auto packed = ota::compress_block(sample_block());
    for (auto _ : state) benchmark::DoNotOptimize(ota::decompress_block(packed));
    state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(ota::kMaxBlockSize));
}
BENCHMARK(BM_Decompress);

static void BM_Session(benchmark::State& state) {
    std::vector<std::uint8_t> bytes(static_cast<std::size_t>(state.range(0)));
    std::mt19937_64 rng(3);
    for (auto& b : bytes) b = static_cast<std::uint8_t>(rng());
    const auto plan = ota::TransferPlan::raw(bytes);
    ota::SessionConfig cfg;
    cfg.loss_prob = 0.05;
    for (auto _ : state) benchmark::DoNotOptimize(ota::simulate_session(plan, bytes, cfg));
}
BENCHMARK(BM_Session)->Arg(6000)->Arg(99000)->Unit(benchmark::kMillisecond);
