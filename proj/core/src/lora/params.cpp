#include "iotphy/lora/params.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

namespace iotphy::lora {

const char* to_string(ChirpDirection d) noexcept { return d == ChirpDirection::up ? "up" : "down"; }

namespace {

bool on_bandwidth_grid(double bw) {
    for (double b = kMinBandwidthHz; b <= kMaxBandwidthHz; b *= 2.0) {
        if (bw == b) {
            return true;
        }
    }
    return false;
}

}  // namespace

void LoraParams::validate() const {
    if (sf < kMinSf || sf > kMaxSf) {
        throw std::invalid_argument("sf must be in [6, 12], got " + std::to_string(sf));
    }
    if (!on_bandwidth_grid(bw_hz)) {
        throw std::invalid_argument("bw_hz must be 7812.5 * 2^k Hz up to 500 kHz, got " +
                                    std::to_string(bw_hz));
    }
    if (osr < 1) {
        throw std::invalid_argument("osr must be a positive integer");
    }
    const double rate = bw_hz * osr;
    if (rate != std::floor(rate)) {
        throw std::invalid_argument("bw_hz * osr must be an integer sample rate");
    }
    if (coding_rate_denominator < 4 || coding_rate_denominator > 8) {
        throw std::invalid_argument("coding_rate_denominator must be in [4, 8]");
    }
    if (preamble_len < 0) {
        throw std::invalid_argument("preamble_len must be non-negative");
    }
    for (auto s : sync_symbols) {
        if (s >= chips()) {
            throw std::invalid_argument("sync symbol " + std::to_string(s) + " exceeds 2^sf");
        }
    }
    if (!(sfd_len_symbols >= 0.0) || !std::isfinite(sfd_len_symbols)) {
        throw std::invalid_argument("sfd_len_symbols must be a non-negative number");
    }
}

std::uint64_t LoraParams::sample_rate_hz() const noexcept {
    return static_cast<std::uint64_t>(bw_hz * osr);
}

void to_json(nlohmann::json& j, const LoraParams& p) {
    j = nlohmann::json{{"sf", p.sf},
                       {"bw_hz", p.bw_hz},
                       {"osr", p.osr},
                       {"coding_rate_denominator", p.coding_rate_denominator},
                       {"preamble_len", p.preamble_len},
                       {"sync_symbols", p.sync_symbols},
                       {"sfd_len_symbols", p.sfd_len_symbols}};
}

void from_json(const nlohmann::json& j, LoraParams& p) {
    if (!j.is_object()) {
        throw std::invalid_argument("LoRa config must be a JSON object");
    }
    LoraParams out;
    for (const auto& [key, value] : j.items()) {
        if (key == "sf") {
            out.sf = value.get<int>();
        } else if (key == "bw_hz") {
            out.bw_hz = value.get<double>();
        } else if (key == "osr") {
            out.osr = value.get<int>();
        } else if (key == "coding_rate_denominator") {
            out.coding_rate_denominator = value.get<int>();
        } else if (key == "preamble_len") {
            out.preamble_len = value.get<int>();
        } else if (key == "sync_symbols") {
            out.sync_symbols = value.get<std::array<std::uint32_t, 2>>();
        } else if (key == "sfd_len_symbols") {
            out.sfd_len_symbols = value.get<double>();
        } else {
            throw std::invalid_argument("unknown LoRa config field '" + key + "'");
        }
    }
    out.validate();
    p = out;
}

ChirpSlope chirp_slope(const LoraParams& p) noexcept {
    return ChirpSlope{p.bw_hz * p.bw_hz / static_cast<double>(p.chips())};
}

void LoraFrame::validate() const {
    params.validate();
    for (std::size_t k = 0; k < symbols.size(); ++k) {
        if (symbols[k] >= params.chips()) {
            throw std::invalid_argument("payload symbol " + std::to_string(k) + " = " +
                                        std::to_string(symbols[k]) + " exceeds 2^sf");
        }
    }
}

}  // namespace iotphy::lora
