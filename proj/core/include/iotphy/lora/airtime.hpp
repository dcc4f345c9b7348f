#pragma once

#include <cstddef>

#include "iotphy/lora/params.hpp"

namespace iotphy::lora {

// sf * bw / 2^sf * 4/cr bits per second (cr == 4 is uncoded).
double data_rate_bps(const LoraParams& params);

// ceil(8 * bytes * cr/4 / sf): coded payload length in symbols.
std::size_t coded_payload_symbols(const LoraParams& params, std::size_t payload_bytes);

// Preamble, sync and SFD duration.
double overhead_airtime_s(const LoraParams& params);

// (preamble + 2 + sfd + coded payload symbols) * 2^sf / bw.
double airtime_s(const LoraParams& params, std::size_t payload_bytes);

}  // namespace iotphy::lora
