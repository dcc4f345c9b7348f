#include "iotphy/iq/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include "iotphy/common/fft.hpp"

namespace iotphy::iq {

Psd periodogram(const SampleBuffer& buf, std::size_t segment) {
    if (buf.empty()) throw std::invalid_argument("periodogram of an empty buffer");
    if (segment < 2) throw std::invalid_argument("periodogram segment must hold at least 2 samples");

    std::vector<double> window(segment);
    for (std::size_t i = 0; i < segment; ++i) {
        window[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(segment));
    }

    Fft fft(segment);
    std::vector<double> acc(segment, 0.0);
    const std::size_t hop = segment / 2;
    std::size_t count = 0;
    for (std::size_t start = 0; count == 0 || start + segment <= buf.size(); start += hop) {
        auto in = fft.input();
        for (std::size_t i = 0; i < segment; ++i) {
            in[i] = start + i < buf.size() ? buf.samples[start + i] * window[i] : ComplexSample{};
        }
        fft.execute();
        const auto out = fft.output();
        for (std::size_t i = 0; i < segment; ++i) acc[i] += std::norm(out[i]);
        ++count;
    }

    Psd psd;
    psd.freq_hz.resize(segment);
    psd.power.resize(segment);
    const double fs = static_cast<double>(buf.sample_rate_hz);
    const std::size_t half = segment / 2;
    for (std::size_t k = 0; k < segment; ++k) {
        const std::size_t src = (k + segment - half) % segment;  // fftshift
        psd.freq_hz[k] = (static_cast<double>(k) - static_cast<double>(half)) * fs / static_cast<double>(segment);
        psd.power[k] = acc[src] / static_cast<double>(count);
    }
    return psd;
}

double occupied_bandwidth_hz(const Psd& psd, double fraction) {
    if (!(fraction > 0.0 && fraction < 1.0)) throw std::invalid_argument("fraction must lie in (0, 1)");
    if (psd.power.size() < 2) throw std::invalid_argument("spectrum too short");
    const double total = std::accumulate(psd.power.begin(), psd.power.end(), 0.0);
    if (!(total > 0.0)) return 0.0;
    const double tail = (1.0 - fraction) / 2.0 * total;
    const double bin = psd.freq_hz[1] - psd.freq_hz[0];

    // Edge of the band from each side: the first bin where cumulative power
    // passes the tail allowance.
    std::size_t lo = 0;
    for (double cum = 0.0; lo < psd.power.size(); ++lo) {
        cum += psd.power[lo];
        if (cum > tail) break;
    }
    std::size_t hi = psd.power.size() - 1;
    for (double cum = 0.0; hi > 0; --hi) {
        cum += psd.power[hi];
        if (cum > tail) break;
    }
    if (hi < lo) return bin;
    return psd.freq_hz[hi] - psd.freq_hz[lo] + bin;
}

double occupied_bandwidth_hz(const SampleBuffer& buf, double fraction, std::size_t segment) {
    return occupied_bandwidth_hz(periodogram(buf, segment), fraction);
}

}  // namespace iotphy::iq
