#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "iotphy/common/bits.hpp"

namespace iotphy::ble {

inline constexpr std::uint8_t kPreamble = 0xAA;
inline constexpr std::uint32_t kAccessAddress = 0x8E89BED6;
inline constexpr std::uint32_t kCrcInit = 0x555555;
// x^24 + x^10 + x^9 + x^6 + x^4 + x^3 + x + 1 without the x^24 term.
inline constexpr std::uint32_t kCrcPoly = 0x00065B;
inline constexpr std::uint8_t kAdvNonconnInd = 0x2;
inline constexpr std::size_t kMaxAdvData = 31;
inline constexpr int kMaxChannel = 39;

// CRC register after shifting every bit of `bytes`, each byte LSB first. The
// register shifts towards bit 23 and the feedback is bit 23 XOR the input bit.
std::uint32_t crc24(std::span<const std::uint8_t> bytes, std::uint32_t init = kCrcInit);

// The three CRC bytes in on-air order. Sent LSB first, they put register
// bit 23 on the air first.
std::array<std::uint8_t, 3> crc24_bytes(std::uint32_t crc);
std::uint32_t crc24_from_bytes(std::span<const std::uint8_t, 3> bytes);

// 7-bit whitening LFSR (x^7 + x^4 + 1) seeded with the low 7 bits of the
// channel number, register bit i taking channel bit i. Each step outputs
// bit 6, shifts left, and feeds the output back into bits 0 and 4.
class Whitener {
public:
    explicit Whitener(int channel);
    std::uint8_t next_bit() noexcept;
    std::uint8_t next_byte() noexcept;  // eight bits, first one in bit 0
    std::uint8_t state() const noexcept { return state_; }

private:
    std::uint8_t state_;
};

// XOR with the channel's keystream. Throws std::invalid_argument unless
// 0 <= channel <= 39. Applying it twice returns the input.
std::vector<std::uint8_t> whiten(std::span<const std::uint8_t> bytes, int channel);

struct BleAdvPdu {
    std::uint8_t pdu_type = kAdvNonconnInd;  // low nibble of header byte 1
    std::uint8_t flags = 0;                  // high nibble of header byte 1
    std::array<std::uint8_t, 6> adv_address{};
    std::vector<std::uint8_t> adv_data;

    // Value of the length byte: address plus data.
    std::size_t length() const noexcept { return adv_address.size() + adv_data.size(); }
    // Throws std::invalid_argument for a type or flags above 4 bits or more
    // than 31 data bytes.
    void validate() const;
    // Header (type/flags byte, length byte), address, data.
    std::vector<std::uint8_t> to_bytes() const;
    static BleAdvPdu from_bytes(std::span<const std::uint8_t> bytes);

    bool operator==(const BleAdvPdu&) const = default;
};

bool is_advertising_channel(int channel) noexcept;

struct BleAdvPacket {
    BleAdvPdu pdu;
    std::uint32_t crc = 0;
    int channel = 37;

    // Everything after the access address as sent: whiten(pdu || crc).
    std::vector<std::uint8_t> whitened_bytes() const;
    // Preamble, access address and whitened section as one byte sequence.
    std::vector<std::uint8_t> air_bytes() const;
    Bits to_bits() const;
};

// Throws std::invalid_argument if the PDU is invalid or the channel is not
// 37, 38 or 39.
BleAdvPacket make_packet(const BleAdvPdu& pdu, int channel);
Bits assemble_packet(const BleAdvPdu& pdu, int channel);

// Inverse of assemble_packet: checks preamble and access address, de-whitens,
// and returns the PDU only if the length is consistent and the CRC matches.
std::optional<BleAdvPdu> deassemble_packet(std::span<const std::uint8_t> bits, int channel);

// {"adv_address": hex, "adv_data": hex, "channel": int}. Hex strings go
// through parse_hex; the address must be exactly 6 bytes, sent in the order
// written.
struct BeaconRequest {
    BleAdvPdu pdu;
    int channel = 37;
};
BeaconRequest beacon_request_from_json(const nlohmann::json& j);

}  // namespace iotphy::ble
