#include "iotphy/lora/fir.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

namespace iotphy::lora {

namespace {

// Half-sample symmetric reflection into [0, n).
std::size_t reflect_index(std::ptrdiff_t i, std::size_t n) {
    const auto period = static_cast<std::ptrdiff_t>(2 * n);
    std::ptrdiff_t m = i % period;
    if (m < 0) {
        m += period;
    }
    if (m >= static_cast<std::ptrdiff_t>(n)) {
        m = period - 1 - m;
    }
    return static_cast<std::size_t>(m);
}

constexpr std::ptrdiff_t kDelayCompensation = 7;

}  // namespace

std::array<double, kFirTaps> design_lowpass_taps(double normalized_cutoff) {
    if (!(normalized_cutoff > 0.0 && normalized_cutoff < 0.5)) {
        throw std::invalid_argument("FIR cutoff must lie strictly between 0 and half the sample rate");
    }
    constexpr double kPi = std::numbers::pi;
    constexpr double centre = (kFirTaps - 1) / 2.0;
    std::array<double, kFirTaps> taps{};
    double sum = 0.0;
    for (std::size_t n = 0; n < kFirTaps; ++n) {
        const double t = static_cast<double>(n) - centre;
        const double x = 2.0 * normalized_cutoff * t;
        const double sinc = std::sin(kPi * x) / (kPi * x);  // t is never 0 for an even length
        const double window = 0.54 - 0.46 * std::cos(2.0 * kPi * static_cast<double>(n) / (kFirTaps - 1));
        taps[n] = 2.0 * normalized_cutoff * sinc * window;
        sum += taps[n];
    }
    for (auto& t : taps) {
        t /= sum;
    }
    return taps;
}

double lowpass_response(const std::array<double, kFirTaps>& taps, double normalized_freq) {
    std::complex<double> acc{0.0, 0.0};
    for (std::size_t n = 0; n < kFirTaps; ++n) {
        acc += taps[n] * std::polar(1.0, -2.0 * std::numbers::pi * normalized_freq * static_cast<double>(n));
    }
    return std::abs(acc);
}

iq::SampleBuffer fir_apply(const iq::SampleBuffer& buf, const std::array<double, kFirTaps>& taps) {
    const std::size_t n = buf.size();
    std::vector<iq::ComplexSample> out(n);
    if (n == 0) {
        return iq::SampleBuffer(std::move(out), buf.sample_rate_hz);
    }
    const auto& x = buf.samples;
    const auto sn = static_cast<std::ptrdiff_t>(n);
    for (std::ptrdiff_t i = 0; i < sn; ++i) {
        iq::ComplexSample acc{0.0, 0.0};
        const std::ptrdiff_t base = i + kDelayCompensation;
        if (base - static_cast<std::ptrdiff_t>(kFirTaps - 1) >= 0 && base < sn) {
            for (std::size_t k = 0; k < kFirTaps; ++k) {
                acc += taps[k] * x[static_cast<std::size_t>(base - static_cast<std::ptrdiff_t>(k))];
            }
        } else {
            for (std::size_t k = 0; k < kFirTaps; ++k) {
                acc += taps[k] * x[reflect_index(base - static_cast<std::ptrdiff_t>(k), n)];
            }
        }
        out[static_cast<std::size_t>(i)] = acc;
    }
    return iq::SampleBuffer(std::move(out), buf.sample_rate_hz);
}

iq::SampleBuffer fir_lowpass(const iq::SampleBuffer& buf, double cutoff_hz) {
    const auto taps = design_lowpass_taps(cutoff_hz / static_cast<double>(buf.sample_rate_hz));
    return fir_apply(buf, taps);
}

double default_fir_cutoff_hz(const LoraParams& params) noexcept { return 0.5 * params.bw_hz; }

}  // namespace iotphy::lora
