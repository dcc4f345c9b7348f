#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace iotphy::ble {

using namespace std::chrono_literals;

inline constexpr std::chrono::nanoseconds kDefaultHopGap = 220us;
inline constexpr std::chrono::nanoseconds kMinAdvInterval = 20ms;

struct AdvEvent {
    int channel = 37;
    std::chrono::nanoseconds start{0};

    bool operator==(const AdvEvent&) const = default;
};

// `bursts` advertising events, each sending on 37, 38, 39 with starts
// hop_gap apart; bursts start `interval` apart. Throws std::invalid_argument
// for an interval under 20 ms, a non-positive hop gap, or a burst that would
// not finish its last hop before the next burst.
std::vector<AdvEvent> advertising_schedule(std::chrono::nanoseconds interval, std::chrono::nanoseconds start,
                                           std::size_t bursts,
                                           std::chrono::nanoseconds hop_gap = kDefaultHopGap);

// Exact sample index of a time instant; throws std::invalid_argument if the
// instant does not land on a sample at this rate.
std::uint64_t sample_index(std::chrono::nanoseconds t, std::uint64_t sample_rate_hz);

}  // namespace iotphy::ble
