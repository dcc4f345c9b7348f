#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <span>
#include <vector>

#include "iotphy/iq/sample.hpp"

namespace iotphy::channel {

// Pass as snr_db to get the input back unchanged.
inline constexpr double kNoiseless = std::numeric_limits<double>::infinity();

// Adds circularly-symmetric Gaussian noise of total variance
// mean_power(buf) / 10^(snr_db/10), split evenly between I and Q.
// Deterministic for a given seed.
iq::SampleBuffer awgn(const iq::SampleBuffer& buf, double snr_db, std::uint64_t seed);

// In-place complex Gaussian noise with E|n|^2 == noise_power.
void add_noise(std::span<iq::ComplexSample> samples, double noise_power, std::mt19937_64& rng);

struct Source {
    std::reference_wrapper<const iq::SampleBuffer> buffer;
    double gain_db = 0.0;
    std::size_t delay_samples = 0;
};

// Sum of delayed, amplitude-scaled sources. Output length is the largest
// delay + length. Throws std::invalid_argument on mismatched sample rates or
// an empty source list.
iq::SampleBuffer combine(std::span<const Source> sources);

// Mixes by offset_hz. Only integer multiples of the LoRa bin spacing (bw / 2^sf)
// are meaningful for the demodulator tests.
iq::SampleBuffer frequency_shift(const iq::SampleBuffer& buf, double offset_hz);

// Per-source gains/delays plus receiver noise, as applied by apply_channel.
struct ChannelConfig {
    double snr_db = kNoiseless;
    std::vector<double> gain_db;
    std::vector<std::size_t> delay_samples;
    std::uint64_t seed = 0;
};

// combine() followed by awgn() relative to the combined signal power.
iq::SampleBuffer apply_channel(std::span<const std::reference_wrapper<const iq::SampleBuffer>> sources,
                               const ChannelConfig& config);

// i.i.d. Bernoulli delivery mask: true means delivered.
std::vector<bool> packet_erasure(std::size_t n_packets, double loss_prob, std::uint64_t seed);

// Streaming form of packet_erasure for simulations that do not know the
// packet count in advance. A random channel yields exactly the sequence
// packet_erasure(n, loss_prob, seed) would for any n. A scripted channel
// replays a fixed mask and delivers everything after it.
class ErasureChannel {
public:
    static ErasureChannel random(double loss_prob, std::uint64_t seed);
    static ErasureChannel scripted(std::vector<bool> delivery_mask);

    bool next_delivered();
    std::size_t draws() const noexcept { return draws_; }

private:
    ErasureChannel() = default;

    bool scripted_ = false;
    std::vector<bool> mask_;
    std::mt19937_64 rng_;
    std::bernoulli_distribution loss_{0.0};
    std::size_t draws_ = 0;
};

}  // namespace iotphy::channel
