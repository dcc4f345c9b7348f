#pragma once

#include <cstddef>
#include <vector>

#include "iotphy/iq/sample.hpp"

namespace iotphy::iq {

// Power spectrum on bins ordered from -fs/2 to just below +fs/2.
struct Psd {
    std::vector<double> freq_hz;
    std::vector<double> power;
};

// Averaged periodogram: Hann-windowed segments of `segment` samples with 50%
// overlap (a single zero-padded segment when the buffer is shorter).
// Throws std::invalid_argument for an empty buffer or segment < 2.
Psd periodogram(const SampleBuffer& buf, std::size_t segment = 1024);

// Width of the band holding `fraction` of the total power, leaving
// (1 - fraction) / 2 below and above.
double occupied_bandwidth_hz(const Psd& psd, double fraction = 0.99);
double occupied_bandwidth_hz(const SampleBuffer& buf, double fraction = 0.99, std::size_t segment = 1024);

}  // namespace iotphy::iq
