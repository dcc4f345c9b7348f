#pragma once

#include <array>
#include <cstddef>

#include "iotphy/iq/sample.hpp"
#include "iotphy/lora/params.hpp"

namespace iotphy::lora {

inline constexpr std::size_t kFirTaps = 14;

// Hamming-windowed sinc low-pass, normalized to unit DC gain.
// `normalized_cutoff` is cutoff_hz / sample_rate_hz and must lie in (0, 0.5).
std::array<double, kFirTaps> design_lowpass_taps(double normalized_cutoff);

// Magnitude of the taps' frequency response at `normalized_freq` cycles/sample.
double lowpass_response(const std::array<double, kFirTaps>& taps, double normalized_freq);

// Same-length convolution. The 6.5-sample group delay is compensated by seven
// samples (output n is centred on input n + 0.5, so timing errors fall early
// and a symbol window never runs past the end of a frame); edges use
// symmetric padding.
iq::SampleBuffer fir_lowpass(const iq::SampleBuffer& buf, double cutoff_hz);
iq::SampleBuffer fir_apply(const iq::SampleBuffer& buf, const std::array<double, kFirTaps>& taps);

// Receiver default: cutoff at half the LoRa bandwidth. Only meaningful when
// osr >= 2; at osr == 1 the band edge is Nyquist and no filter is applied.
double default_fir_cutoff_hz(const LoraParams& params) noexcept;

}  // namespace iotphy::lora
