#include "iotphy/iq/quantize.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace iotphy::iq {

namespace {

std::int16_t quantize_component(double x, double full_scale) {
    // std::lround rounds half away from zero.
    const long v = std::lround(x / full_scale * kQ13Scale);
    return static_cast<std::int16_t>(std::clamp<long>(v, kQ13Min, kQ13Max));
}

bool in_q13(int v) { return v >= kQ13Min && v <= kQ13Max; }

}  // namespace

std::vector<QuantizedSample> quantize(const SampleBuffer& buf, double full_scale) {
    if (!(full_scale > 0.0) || !std::isfinite(full_scale)) {
        throw std::invalid_argument("full_scale must be a positive finite value");
    }
    require_finite(buf.samples);
    std::vector<QuantizedSample> out;
    out.reserve(buf.size());
    for (const auto& s : buf.samples) {
        out.push_back({quantize_component(s.real(), full_scale),
                       quantize_component(s.imag(), full_scale)});
    }
    return out;
}

SampleBuffer dequantize(std::span<const QuantizedSample> qs, double full_scale,
                        std::uint64_t sample_rate_hz) {
    if (!(full_scale > 0.0) || !std::isfinite(full_scale)) {
        throw std::invalid_argument("full_scale must be a positive finite value");
    }
    std::vector<ComplexSample> out;
    out.reserve(qs.size());
    for (std::size_t k = 0; k < qs.size(); ++k) {
        const auto& q = qs[k];
        if (!in_q13(q.i_q13) || !in_q13(q.q_q13)) {
            throw std::invalid_argument("quantized sample " + std::to_string(k) +
                                        " outside the 13-bit range");
        }
        out.emplace_back(q.i_q13 / kQ13Scale * full_scale, q.q_q13 / kQ13Scale * full_scale);
    }
    return SampleBuffer(std::move(out), sample_rate_hz);
}

}  // namespace iotphy::iq
