#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "iotphy/common/fft.hpp"
#include "iotphy/iq/sample.hpp"
#include "iotphy/lora/params.hpp"

namespace iotphy::lora {

struct SymbolDecision {
    std::uint32_t value = 0;
    double peak_magnitude = 0.0;
};

// Dechirp + FFT symbol detector for one LoRa configuration.
//
// The window is multiplied by the conjugate zero-shift reference and its
// 2^sf * osr point spectrum is folded onto 2^sf bins (bin b collects every
// bin congruent to b mod 2^sf). The fold equals osr times the 2^sf point DFT
// of every osr-th dechirped sample, which is how it is computed. Ties go to
// the lowest bin. For an ideal chirp the peak magnitude is 2^sf * osr.
//
// Holds scratch buffers: one instance per thread.
class SymbolDemodulator {
public:
    explicit SymbolDemodulator(const LoraParams& params);

    const LoraParams& params() const noexcept { return params_; }

    // Throws std::invalid_argument unless window.size() == samples_per_symbol().
    SymbolDecision demod(std::span<const iq::ComplexSample> window, ChirpDirection reference);

    // Larger peak of the two references wins; an exact tie reads as up.
    ChirpDirection detect_direction(std::span<const iq::ComplexSample> window);

    // Folded bin magnitudes of the last demod() call (reference order, before
    // the downchirp bin mapping).
    std::span<const double> last_magnitudes() const noexcept { return magnitudes_; }

    double last_median_magnitude() const;

private:
    LoraParams params_;
    std::vector<iq::ComplexSample> up_ref_conj_;    // decimated points only
    std::vector<iq::ComplexSample> down_ref_conj_;  // decimated points only
    Fft fft_;
    std::vector<double> magnitudes_;
    mutable std::vector<double> scratch_;
};

SymbolDecision demod_symbol(const iq::SampleBuffer& buf, const LoraParams& params,
                            ChirpDirection reference);
ChirpDirection detect_chirp_direction(const iq::SampleBuffer& buf, const LoraParams& params);

struct SyncResult {
    // Estimated first preamble sample; negative when the preamble was truncated.
    std::ptrdiff_t frame_start = 0;
    std::size_t sfd_start = 0;
    std::size_t payload_start = 0;
    std::array<std::uint32_t, 2> sync_values{0, 0};
};

// Preamble detection: consecutive symbol-length windows are demodulated and a
// preamble is declared once four in a row read the same bin with a peak at
// least 4x the median bin magnitude. The bin gives the chip offset of the
// chirp boundary; a +/- osr sample search then maximizes bin 0. Walking
// forward, the first two consecutive downchirp windows mark the SFD and the two
// upchirps before them are the sync symbols. Returns std::nullopt when no
// preamble/SFD is found.
std::optional<SyncResult> packet_sync(const iq::SampleBuffer& buf, const LoraParams& params);

struct DemodResult {
    std::vector<std::uint32_t> symbols;
    std::vector<double> fft_peak_magnitudes;
    std::vector<ChirpDirection> chirp_directions;
    // First payload sample.
    std::size_t start_offset_samples = 0;
};

struct FrameDecode {
    DemodResult result;
    std::vector<std::uint8_t> bytes;
    SyncResult sync;
    // Samples after the last whole symbol that were not demodulated.
    std::size_t dropped_samples = 0;
    // Set when payload_bytes asked for more symbols than the buffer holds.
    bool truncated = false;
};

// FIR (osr >= 2) -> packet_sync -> per-symbol demod -> unpack_bits. Without
// payload_bytes every whole symbol to the end of the buffer is demodulated and
// floor(symbols * sf / 8) bytes are unpacked. Returns std::nullopt when sync
// is not found. Throws std::invalid_argument when the buffer's sample rate is
// not bw * osr.
std::optional<FrameDecode> demodulate_frame(const iq::SampleBuffer& buf, const LoraParams& params,
                                            std::optional<std::size_t> payload_bytes = {});

struct ConcurrentStream {
    LoraParams params;
    std::optional<std::size_t> payload_bytes;
};

struct ConcurrentDecode {
    std::vector<std::optional<FrameDecode>> results;  // one per configuration, same order
    std::vector<std::string> warnings;
    bool non_orthogonal = false;
};

// Runs demodulate_frame once per configuration on the same buffer. Every
// configuration must share the buffer's sample rate (std::invalid_argument
// otherwise). Equal chirp slopes are flagged as non-orthogonal.
ConcurrentDecode concurrent_decode(const iq::SampleBuffer& buf, std::span<const ConcurrentStream> streams);
ConcurrentDecode concurrent_decode(const iq::SampleBuffer& buf, std::span<const LoraParams> params_list);

}  // namespace iotphy::lora
