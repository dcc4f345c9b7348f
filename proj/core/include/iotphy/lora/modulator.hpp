#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "iotphy/iq/sample.hpp"
#include "iotphy/lora/params.hpp"

namespace iotphy::lora {

// One chirp of 2^sf * osr unit-amplitude samples with cyclic shift `symbol`.
// Chip k (osr samples each) has frequency ((k + symbol) mod 2^sf)/2^sf*bw - bw/2;
// a downchirp negates that trajectory. Phase starts at zero and integrates
// 2*pi*f/sample_rate per sample. Throws std::invalid_argument for symbol >= 2^sf.
iq::SampleBuffer chirp_gen(const LoraParams& params, std::uint32_t symbol, ChirpDirection direction);

// Appends the first `n_samples` samples of the same chirp (n_samples may be
// shorter than a full symbol, as for the fractional SFD tail), starting from
// `phase` radians. Returns the phase reached after the last sample, so chirps
// can be chained without a phase step.
double append_chirp(std::vector<iq::ComplexSample>& out, const LoraParams& params,
                    std::uint32_t symbol, ChirpDirection direction, std::size_t n_samples,
                    double phase = 0.0);

// Preamble upchirps, two sync upchirps, SFD downchirps, payload upchirps.
iq::SampleBuffer modulate_frame(const LoraFrame& frame);

// Samples in the fractional part of the SFD, rounded to the nearest sample.
std::size_t sfd_tail_samples(const LoraParams& params) noexcept;
std::size_t preamble_sync_sfd_samples(const LoraParams& params) noexcept;
std::size_t frame_length_samples(const LoraParams& params, std::size_t payload_symbols) noexcept;

// MSB-first grouping of the payload bitstream into sf-bit symbols, zero padded
// at the tail.
std::vector<std::uint32_t> pack_bits(std::span<const std::uint8_t> payload, int sf);

// Inverse of pack_bits. Throws std::invalid_argument when the symbol count is
// not exactly ceil(8 * n_bytes / sf) or a symbol does not fit in sf bits.
std::vector<std::uint8_t> unpack_bits(std::span<const std::uint32_t> symbols, int sf,
                                      std::size_t n_bytes);

std::size_t symbols_for_bytes(std::size_t n_bytes, int sf) noexcept;

}  // namespace iotphy::lora
