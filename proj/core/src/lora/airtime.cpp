#include "iotphy/lora/airtime.hpp"

namespace iotphy::lora {

double data_rate_bps(const LoraParams& params) {
    params.validate();
    return params.sf * params.bw_hz / static_cast<double>(params.chips()) * 4.0 /
           params.coding_rate_denominator;
}

std::size_t coded_payload_symbols(const LoraParams& params, std::size_t payload_bytes) {
    // 8 * bytes * (cr / 4) / sf == 2 * bytes * cr / sf, kept in integers.
    const std::size_t num = 2 * payload_bytes * static_cast<std::size_t>(params.coding_rate_denominator);
    const auto den = static_cast<std::size_t>(params.sf);
    return (num + den - 1) / den;
}

double overhead_airtime_s(const LoraParams& params) {
    params.validate();
    return (params.preamble_len + 2.0 + params.sfd_len_symbols) * params.symbol_duration_s();
}

double airtime_s(const LoraParams& params, std::size_t payload_bytes) {
    params.validate();
    const double symbols = params.preamble_len + 2.0 + params.sfd_len_symbols +
                           static_cast<double>(coded_payload_symbols(params, payload_bytes));
    return symbols * params.symbol_duration_s();
}

}  // namespace iotphy::lora
