#include "iotphy/ble/gfsk.hpp"

#include "iotphy/channel/channel.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>

namespace iotphy::ble {

void GfskConfig::validate() const {
    if (!(modulation_index >= 0.45 && modulation_index <= 0.55)) {
        throw std::invalid_argument("modulation index must lie in [0.45, 0.55]");
    }
    if (osr < 2) throw std::invalid_argument("GFSK osr must be at least 2");
    if (!(bit_rate_bps > 0.0) || !(gaussian_bt > 0.0)) {
        throw std::invalid_argument("bit rate and BT must be positive");
    }
    const double fs = bit_rate_bps * osr;
    if (fs != std::round(fs)) throw std::invalid_argument("bit_rate * osr must be a whole number of Hz");
}

std::uint64_t GfskConfig::sample_rate_hz() const {
    validate();
    return static_cast<std::uint64_t>(std::llround(bit_rate_bps * osr));
}

std::vector<double> gaussian_pulse(const GfskConfig& cfg) {
    cfg.validate();
    const int half = 2 * cfg.osr;
    std::vector<double> taps(static_cast<std::size_t>(2 * half + 1));
    // h(t) ~ exp(-2 pi^2 B^2 t^2 / ln 2), t in bit periods, B = BT per bit period.
    const double k = 2.0 * std::numbers::pi * std::numbers::pi * cfg.gaussian_bt * cfg.gaussian_bt / std::numbers::ln2;
    for (int i = -half; i <= half; ++i) {
        const double t = static_cast<double>(i) / cfg.osr;
        taps[static_cast<std::size_t>(i + half)] = std::exp(-k * t * t);
    }
    const double sum = std::accumulate(taps.begin(), taps.end(), 0.0);
    for (auto& t : taps) t /= sum;
    return taps;
}

iq::SampleBuffer gfsk_modulate(std::span<const std::uint8_t> bits, const GfskConfig& cfg) {
    const auto taps = gaussian_pulse(cfg);
    const auto osr = static_cast<std::size_t>(cfg.osr);
    const std::size_t n = bits.size() * osr;
    const auto half = static_cast<std::ptrdiff_t>(taps.size() / 2);
    auto level = [&](std::ptrdiff_t sample) {
        if (bits.empty()) return 0.0;
        const auto last = static_cast<std::ptrdiff_t>(n) - 1;
        const auto clamped = sample < 0 ? 0 : (sample > last ? last : sample);
        return bits[static_cast<std::size_t>(clamped) / osr] != 0 ? 1.0 : -1.0;
    };

    const double fs = static_cast<double>(cfg.sample_rate_hz());
    const double peak_dev = cfg.modulation_index * cfg.bit_rate_bps / 2.0;
    std::vector<iq::ComplexSample> out;
    out.reserve(n);
    double phase = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double filtered = 0.0;
        for (std::ptrdiff_t k = -half; k <= half; ++k) {
            filtered += taps[static_cast<std::size_t>(k + half)] * level(static_cast<std::ptrdiff_t>(i) - k);
        }
        out.emplace_back(std::cos(phase), std::sin(phase));
        phase = std::remainder(phase + 2.0 * std::numbers::pi * peak_dev * filtered / fs, 2.0 * std::numbers::pi);
    }
    return iq::SampleBuffer(std::move(out), cfg.sample_rate_hz());
}

Bits gfsk_demodulate(const iq::SampleBuffer& buf, const GfskConfig& cfg) {
    cfg.validate();
    if (buf.sample_rate_hz != cfg.sample_rate_hz()) {
        throw std::invalid_argument("buffer sample rate " + std::to_string(buf.sample_rate_hz) +
                                    " Hz does not match the GFSK configuration");
    }
    const auto osr = static_cast<std::size_t>(cfg.osr);
    const auto& x = buf.samples;
    Bits out;
    out.reserve(x.size() / osr);
    for (std::size_t b = 0; (b + 1) * osr <= x.size(); ++b) {
        double acc = 0.0;
        for (std::size_t i = b * osr; i < (b + 1) * osr && i + 1 < x.size(); ++i) {
            acc += std::arg(x[i + 1] * std::conj(x[i]));
        }
        out.push_back(acc > 0.0 ? 1 : 0);
    }
    return out;
}

BerPoint measure_ber(const GfskConfig& cfg, double snr_db, std::size_t n_bits, std::uint64_t seed) {
    if (n_bits == 0) return {snr_db, 0, 0};
    std::mt19937_64 rng(seed);
    Bits bits(n_bits);
    for (auto& b : bits) b = static_cast<std::uint8_t>(rng() & 1U);
    const auto rx = channel::awgn(gfsk_modulate(bits, cfg), snr_db, rng());
    const auto decided = gfsk_demodulate(rx, cfg);
    BerPoint p{snr_db, 0, n_bits};
    for (std::size_t i = 0; i < n_bits; ++i) p.bit_errors += decided[i] != bits[i] ? 1 : 0;
    return p;
}

}  // namespace iotphy::ble
