#include "iotphy/lora/modulator.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace iotphy::lora {

double append_chirp(std::vector<iq::ComplexSample>& out, const LoraParams& params,
                    std::uint32_t symbol, ChirpDirection direction, std::size_t n_samples,
                    double phase) {
    const std::size_t n_chips = params.chips();
    if (symbol >= n_chips) {
        throw std::invalid_argument("symbol " + std::to_string(symbol) + " out of range for sf " +
                                    std::to_string(params.sf));
    }
    const auto osr = static_cast<std::size_t>(params.osr);
    const double sign = direction == ChirpDirection::up ? 1.0 : -1.0;
    const double two_pi = 2.0 * std::numbers::pi;

    out.reserve(out.size() + n_samples);
    for (std::size_t j = 0; j < n_samples; ++j) {
        const std::size_t chip = (j / osr + symbol) % n_chips;
        // f / sample_rate, with f = (chip/N - 1/2) * bw and sample_rate = bw * osr.
        const double cycles_per_sample =
            sign * (static_cast<double>(chip) / static_cast<double>(n_chips) - 0.5) /
            static_cast<double>(osr);
        out.emplace_back(std::cos(phase), std::sin(phase));
        phase += two_pi * cycles_per_sample;
    }
    // Every full symbol advances by exactly half a cycle; keep the value small.
    return std::remainder(phase, two_pi);
}

iq::SampleBuffer chirp_gen(const LoraParams& params, std::uint32_t symbol, ChirpDirection direction) {
    std::vector<iq::ComplexSample> out;
    append_chirp(out, params, symbol, direction, params.samples_per_symbol());
    return iq::SampleBuffer(std::move(out), params.sample_rate_hz());
}

std::size_t sfd_tail_samples(const LoraParams& params) noexcept {
    const double frac = params.sfd_len_symbols - std::floor(params.sfd_len_symbols);
    return static_cast<std::size_t>(std::lround(frac * static_cast<double>(params.samples_per_symbol())));
}

std::size_t preamble_sync_sfd_samples(const LoraParams& params) noexcept {
    const std::size_t full_sfd = static_cast<std::size_t>(std::floor(params.sfd_len_symbols));
    return (static_cast<std::size_t>(params.preamble_len) + 2 + full_sfd) * params.samples_per_symbol() +
           sfd_tail_samples(params);
}

std::size_t frame_length_samples(const LoraParams& params, std::size_t payload_symbols) noexcept {
    return preamble_sync_sfd_samples(params) + payload_symbols * params.samples_per_symbol();
}

iq::SampleBuffer modulate_frame(const LoraFrame& frame) {
    frame.validate();
    const auto& p = frame.params;
    const std::size_t sps = p.samples_per_symbol();

    // One continuous phase accumulator across the frame, as in a radio; a
    // window straddling two preamble chirps then still dechirps to a clean tone.
    std::vector<iq::ComplexSample> out;
    out.reserve(frame_length_samples(p, frame.symbols.size()));
    double phase = 0.0;
    for (int k = 0; k < p.preamble_len; ++k) {
        phase = append_chirp(out, p, 0, ChirpDirection::up, sps, phase);
    }
    for (auto s : p.sync_symbols) {
        phase = append_chirp(out, p, s, ChirpDirection::up, sps, phase);
    }
    const auto full_sfd = static_cast<std::size_t>(std::floor(p.sfd_len_symbols));
    for (std::size_t k = 0; k < full_sfd; ++k) {
        phase = append_chirp(out, p, 0, ChirpDirection::down, sps, phase);
    }
    phase = append_chirp(out, p, 0, ChirpDirection::down, sfd_tail_samples(p), phase);
    for (auto s : frame.symbols) {
        phase = append_chirp(out, p, s, ChirpDirection::up, sps, phase);
    }
    return iq::SampleBuffer(std::move(out), p.sample_rate_hz());
}

std::size_t symbols_for_bytes(std::size_t n_bytes, int sf) noexcept {
    const auto bits = n_bytes * 8;
    const auto w = static_cast<std::size_t>(sf);
    return (bits + w - 1) / w;
}

std::vector<std::uint32_t> pack_bits(std::span<const std::uint8_t> payload, int sf) {
    if (sf < 1 || sf > 31) {
        throw std::invalid_argument("sf out of range for bit packing");
    }
    std::vector<std::uint32_t> symbols;
    symbols.reserve(symbols_for_bytes(payload.size(), sf));
    std::uint32_t acc = 0;
    int filled = 0;
    for (std::uint8_t byte : payload) {
        for (int b = 7; b >= 0; --b) {
            acc = (acc << 1) | ((byte >> b) & 1U);
            if (++filled == sf) {
                symbols.push_back(acc);
                acc = 0;
                filled = 0;
            }
        }
    }
    if (filled > 0) {
        symbols.push_back(acc << (sf - filled));
    }
    return symbols;
}

std::vector<std::uint8_t> unpack_bits(std::span<const std::uint32_t> symbols, int sf,
                                      std::size_t n_bytes) {
    if (sf < 1 || sf > 31) {
        throw std::invalid_argument("sf out of range for bit unpacking");
    }
    if (symbols.size() != symbols_for_bytes(n_bytes, sf)) {
        throw std::invalid_argument(std::to_string(n_bytes) + " bytes need " +
                                    std::to_string(symbols_for_bytes(n_bytes, sf)) +
                                    " symbols at sf " + std::to_string(sf) + ", got " +
                                    std::to_string(symbols.size()));
    }
    std::vector<std::uint8_t> out(n_bytes, 0);
    std::size_t bit = 0;
    for (auto s : symbols) {
        if (s >> sf) {
            throw std::invalid_argument("symbol " + std::to_string(s) + " does not fit in sf bits");
        }
        for (int b = sf - 1; b >= 0 && bit < n_bytes * 8; --b, ++bit) {
            if ((s >> b) & 1U) {
                out[bit / 8] |= static_cast<std::uint8_t>(0x80U >> (bit % 8));
            }
        }
    }
    return out;
}

}  // namespace iotphy::lora
