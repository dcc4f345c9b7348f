#include "iotphy/channel/channel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace iotphy::channel {

void add_noise(std::span<iq::ComplexSample> samples, double noise_power, std::mt19937_64& rng) {
    if (!(noise_power >= 0.0)) {
        throw std::invalid_argument("noise power must be non-negative");
    }
    if (noise_power == 0.0) {
        return;
    }
    std::normal_distribution<double> gauss(0.0, std::sqrt(noise_power / 2.0));
    for (auto& s : samples) {
        const double i = gauss(rng);
        const double q = gauss(rng);
        s += iq::ComplexSample(i, q);
    }
}

iq::SampleBuffer awgn(const iq::SampleBuffer& buf, double snr_db, std::uint64_t seed) {
    if (buf.empty()) {
        throw std::invalid_argument("awgn needs a non-empty buffer");
    }
    if (std::isnan(snr_db)) {
        throw std::invalid_argument("snr_db is NaN");
    }
    iq::SampleBuffer out = buf;
    if (snr_db == kNoiseless) {
        return out;
    }
    const double noise_power = iq::mean_power(buf.samples) / std::pow(10.0, snr_db / 10.0);
    std::mt19937_64 rng(seed);
    add_noise(out.samples, noise_power, rng);
    return out;
}

iq::SampleBuffer combine(std::span<const Source> sources) {
    if (sources.empty()) {
        throw std::invalid_argument("combine needs at least one source");
    }
    const auto rate = sources.front().buffer.get().sample_rate_hz;
    std::size_t length = 0;
    for (const auto& s : sources) {
        if (s.buffer.get().sample_rate_hz != rate) {
            throw std::invalid_argument("combine: sources have different sample rates");
        }
        if (!std::isfinite(s.gain_db)) {
            throw std::invalid_argument("combine: gain must be finite");
        }
        length = std::max(length, s.delay_samples + s.buffer.get().size());
    }
    std::vector<iq::ComplexSample> out(length);
    for (const auto& s : sources) {
        const double amplitude = std::pow(10.0, s.gain_db / 20.0);
        const auto& x = s.buffer.get().samples;
        for (std::size_t k = 0; k < x.size(); ++k) {
            out[s.delay_samples + k] += amplitude * x[k];
        }
    }
    return iq::SampleBuffer(std::move(out), rate);
}

iq::SampleBuffer frequency_shift(const iq::SampleBuffer& buf, double offset_hz) {
    iq::SampleBuffer out = buf;
    const double step = 2.0 * std::numbers::pi * offset_hz / static_cast<double>(buf.sample_rate_hz);
    for (std::size_t k = 0; k < out.size(); ++k) {
        out.samples[k] *= std::polar(1.0, step * static_cast<double>(k));
    }
    return out;
}

iq::SampleBuffer apply_channel(std::span<const std::reference_wrapper<const iq::SampleBuffer>> sources,
                               const ChannelConfig& config) {
    std::vector<Source> list;
    list.reserve(sources.size());
    for (std::size_t k = 0; k < sources.size(); ++k) {
        list.push_back({sources[k], k < config.gain_db.size() ? config.gain_db[k] : 0.0,
                        k < config.delay_samples.size() ? config.delay_samples[k] : 0});
    }
    return awgn(combine(list), config.snr_db, config.seed);
}

std::vector<bool> packet_erasure(std::size_t n_packets, double loss_prob, std::uint64_t seed) {
    auto ch = ErasureChannel::random(loss_prob, seed);
    std::vector<bool> mask(n_packets);
    for (std::size_t k = 0; k < n_packets; ++k) {
        mask[k] = ch.next_delivered();
    }
    return mask;
}

ErasureChannel ErasureChannel::random(double loss_prob, std::uint64_t seed) {
    if (!(loss_prob >= 0.0 && loss_prob <= 1.0)) {
        throw std::invalid_argument("loss probability must lie in [0, 1]");
    }
    ErasureChannel ch;
    ch.rng_.seed(seed);
    ch.loss_ = std::bernoulli_distribution(loss_prob);
    return ch;
}

ErasureChannel ErasureChannel::scripted(std::vector<bool> delivery_mask) {
    ErasureChannel ch;
    ch.scripted_ = true;
    ch.mask_ = std::move(delivery_mask);
    return ch;
}

bool ErasureChannel::next_delivered() {
    const std::size_t k = draws_++;
    if (scripted_) {
        return k < mask_.size() ? static_cast<bool>(mask_[k]) : true;
    }
    return !loss_(rng_);
}

}  // namespace iotphy::channel
