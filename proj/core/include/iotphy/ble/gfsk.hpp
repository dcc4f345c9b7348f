#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "iotphy/common/bits.hpp"
#include "iotphy/iq/sample.hpp"

namespace iotphy::ble {

struct GfskConfig {
    double bit_rate_bps = 1e6;
    double modulation_index = 0.5;
    double gaussian_bt = 0.5;
    int osr = 4;  // samples per bit

    // Throws std::invalid_argument: h outside [0.45, 0.55], osr < 2,
    // non-positive rate or BT, or a sample rate that is not a whole number.
    void validate() const;
    std::uint64_t sample_rate_hz() const;
};

// Gaussian frequency pulse sampled at osr points per bit over four bit
// periods (4 * osr + 1 taps), normalized to unit sum.
std::vector<double> gaussian_pulse(const GfskConfig& cfg);

// Bits (0/1) -> +/-1, held for osr samples, filtered with gaussian_pulse
// (edges padded by repeating the first and last bit), scaled to
// h * bit_rate / 2 Hz, and integrated to phase starting at zero. Output has
// bits.size() * osr unit-magnitude samples.
iq::SampleBuffer gfsk_modulate(std::span<const std::uint8_t> bits, const GfskConfig& cfg);

// Phase-difference discriminator, summed over each bit period, sign decision.
// The buffer must start on a bit boundary; trailing partial bits are ignored.
Bits gfsk_demodulate(const iq::SampleBuffer& buf, const GfskConfig& cfg);

struct BerPoint {
    double snr_db = 0.0;
    std::size_t bit_errors = 0;
    std::size_t bits = 0;

    double ber() const noexcept { return bits == 0 ? 0.0 : static_cast<double>(bit_errors) / static_cast<double>(bits); }
};

// Random bits through gfsk_modulate, AWGN at snr_db over the full sampled band,
// and gfsk_demodulate. Deterministic for a given seed.
BerPoint measure_ber(const GfskConfig& cfg, double snr_db, std::size_t n_bits, std::uint64_t seed);

}  // namespace iotphy::ble
