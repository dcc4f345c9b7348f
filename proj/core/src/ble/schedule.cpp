#include "iotphy/ble/schedule.hpp"

#include <stdexcept>
#include <string>

namespace iotphy::ble {

std::vector<AdvEvent> advertising_schedule(std::chrono::nanoseconds interval, std::chrono::nanoseconds start,
                                           std::size_t bursts, std::chrono::nanoseconds hop_gap) {
    if (interval < kMinAdvInterval) {
        throw std::invalid_argument("advertising interval must be at least 20 ms, got " +
                                    std::to_string(interval.count()) + " ns");
    }
    if (hop_gap <= 0ns || 2 * hop_gap >= interval) {
        throw std::invalid_argument("hop gap must be positive and fit three hops inside the interval");
    }
    std::vector<AdvEvent> out;
    out.reserve(bursts * 3);
    for (std::size_t b = 0; b < bursts; ++b) {
        const auto burst_start = start + static_cast<std::int64_t>(b) * interval;
        for (int k = 0; k < 3; ++k) out.push_back({37 + k, burst_start + k * hop_gap});
    }
    return out;
}

std::uint64_t sample_index(std::chrono::nanoseconds t, std::uint64_t sample_rate_hz) {
    if (t < 0ns) throw std::invalid_argument("negative time");
    if (sample_rate_hz == 0) throw std::invalid_argument("sample rate must be positive");
    constexpr std::uint64_t kNsPerS = 1'000'000'000;
    const auto ns = static_cast<std::uint64_t>(t.count());
    const std::uint64_t frac = (ns % kNsPerS) * sample_rate_hz;
    if (frac % kNsPerS != 0) {
        throw std::invalid_argument("time " + std::to_string(t.count()) + " ns is not on a sample boundary");
    }
    return (ns / kNsPerS) * sample_rate_hz + frac / kNsPerS;
}

}  // namespace iotphy::ble
