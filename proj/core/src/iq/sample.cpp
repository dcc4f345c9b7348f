#include "iotphy/iq/sample.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace iotphy::iq {

SampleBuffer::SampleBuffer(std::vector<ComplexSample> s, std::uint64_t rate_hz)
    : samples(std::move(s)), sample_rate_hz(rate_hz) {
    if (rate_hz == 0) {
        throw std::invalid_argument("sample_rate_hz must be positive");
    }
}

void require_finite(std::span<const ComplexSample> samples) {
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (!std::isfinite(samples[i].real()) || !std::isfinite(samples[i].imag())) {
            throw std::invalid_argument("non-finite sample at index " + std::to_string(i));
        }
    }
}

double mean_power(std::span<const ComplexSample> samples) {
    if (samples.empty()) {
        return 0.0;
    }
    double acc = 0.0;
    for (const auto& s : samples) {
        acc += std::norm(s);
    }
    return acc / static_cast<double>(samples.size());
}

}  // namespace iotphy::iq
