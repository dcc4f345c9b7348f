#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace iotphy::lora {

enum class ChirpDirection { up, down };

const char* to_string(ChirpDirection d) noexcept;

inline constexpr int kMinSf = 6;
inline constexpr int kMaxSf = 12;
inline constexpr double kMinBandwidthHz = 7812.5;
inline constexpr double kMaxBandwidthHz = 500000.0;

// Configuration shared by every LoRa operation. Serialized to JSON with the
// member names verbatim.
struct LoraParams {
    int sf = 8;
    double bw_hz = 125000.0;
    int osr = 1;
    // Rate 4/cr. cr == 4 means uncoded.
    int coding_rate_denominator = 4;
    int preamble_len = 10;
    std::array<std::uint32_t, 2> sync_symbols{0, 0};
    double sfd_len_symbols = 2.25;

    // Throws std::invalid_argument describing the first violated constraint.
    void validate() const;

    std::size_t chips() const noexcept { return std::size_t{1} << sf; }
    std::size_t samples_per_symbol() const noexcept { return chips() * static_cast<std::size_t>(osr); }
    std::uint64_t sample_rate_hz() const noexcept;
    double symbol_duration_s() const noexcept { return static_cast<double>(chips()) / bw_hz; }

    friend bool operator==(const LoraParams&, const LoraParams&) = default;
};

void to_json(nlohmann::json& j, const LoraParams& p);
// Missing fields keep their defaults; unknown fields are rejected. The result
// is validated.
void from_json(const nlohmann::json& j, LoraParams& p);

// Chirp slope BW^2 / 2^SF in Hz/s. Streams with different slopes are
// quasi-orthogonal.
struct ChirpSlope {
    double hz_per_s = 0.0;
    friend auto operator<=>(const ChirpSlope&, const ChirpSlope&) = default;
};

ChirpSlope chirp_slope(const LoraParams& p) noexcept;

struct LoraFrame {
    std::vector<std::uint32_t> symbols;
    LoraParams params;

    void validate() const;
};

}  // namespace iotphy::lora
