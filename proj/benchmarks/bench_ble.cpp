#include <benchmark/benchmark.h>

#include <random>

#include "iotphy/ble/gfsk.hpp"
#include "iotphy/ble/packet.hpp"

using namespace iotphy;

static void BM_Crc24(benchmark::State& state) {
    std::vector<std::uint8_t> pdu(static_cast<std::size_t>(state.range(0)), 0x5A);
    for (auto _ : state) benchmark::DoNotOptimize(ble::crc24(pdu));
    state.SetBytesProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Crc24)->Arg(39)->Arg(4096);

static void BM_Whiten(benchmark::State& state) {
    std::vector<std::uint8_t> pdu(static_cast<std::size_t>(state.range(0)), 0x5A);
    for (auto _ : state) benchmark::DoNotOptimize(ble::whiten(pdu, 37));
    state.SetBytesProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Whiten)->Arg(39)->Arg(4096);

static void BM_GfskModulate(benchmark::State& state) {
    std::mt19937_64 rng(1);
    Bits bits(static_cast<std::size_t>(state.range(0)));
    for (auto& b : bits) b = static_cast<std::uint8_t>(rng() & 1U);
    const ble::GfskConfig cfg;
    for (auto _ : state) benchmark::DoNotOptimize(ble::gfsk_modulate(bits, cfg));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_GfskModulate)->Arg(376)->Arg(10000);

static void BM_GfskDemodulate(benchmark::State& state) {
    std::mt19937_64 rng(1);
    Bits bits(10000);
    for (auto& b : bits) b = static_cast<std::uint8_t>(rng() & 1U);
    const ble::GfskConfig cfg;
    const auto buf = ble::gfsk_modulate(bits, cfg);
    for (auto _ : state) benchmark::DoNotOptimize(ble::gfsk_demodulate(buf, cfg));
    state.SetItemsProcessed(state.iterations() * 10000);
}
BENCHMARK(BM_GfskDemodulate);
