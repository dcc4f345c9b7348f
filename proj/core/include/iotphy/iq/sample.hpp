#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace iotphy::iq {

using ComplexSample = std::complex<double>;

// Baseband I/Q time series. Every PHY operation consumes and produces these.
struct SampleBuffer {
    std::vector<ComplexSample> samples;
    std::uint64_t sample_rate_hz = 1;

    SampleBuffer() = default;
    // Throws std::invalid_argument when sample_rate_hz is zero.
    SampleBuffer(std::vector<ComplexSample> s, std::uint64_t rate_hz);

    std::size_t size() const noexcept { return samples.size(); }
    bool empty() const noexcept { return samples.empty(); }
    std::span<const ComplexSample> view() const noexcept { return samples; }
    double duration_s() const noexcept {
        return static_cast<double>(samples.size()) / static_cast<double>(sample_rate_hz);
    }
};

// Throws std::invalid_argument naming the first index holding NaN/Inf.
void require_finite(std::span<const ComplexSample> samples);

double mean_power(std::span<const ComplexSample> samples);

}  // namespace iotphy::iq
