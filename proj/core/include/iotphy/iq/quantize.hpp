#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "iotphy/iq/sample.hpp"

namespace iotphy::iq {

// 13-bit two's-complement range of the radio's ADC/DAC words.
inline constexpr int kQ13Min = -4096;
inline constexpr int kQ13Max = 4095;
inline constexpr double kQ13Scale = 4095.0;

struct QuantizedSample {
    std::int16_t i_q13 = 0;
    std::int16_t q_q13 = 0;

    friend bool operator==(const QuantizedSample&, const QuantizedSample&) = default;
};

// round(x / full_scale * 4095), half away from zero, clamped to 13 bits.
std::vector<QuantizedSample> quantize(const SampleBuffer& buf, double full_scale = 1.0);

SampleBuffer dequantize(std::span<const QuantizedSample> qs, double full_scale,
                        std::uint64_t sample_rate_hz);

}  // namespace iotphy::iq
