#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace iotphy::ota {

// CRC-16/CCITT-FALSE: poly 0x1021, init 0xFFFF, MSB first, no final XOR.
std::uint16_t crc16_ccitt(std::span<const std::uint8_t> bytes, std::uint16_t init = 0xFFFF) noexcept;

inline constexpr std::size_t kMaxDataPayload = 60;

enum class PacketKind : std::uint8_t { request = 1, ready = 2, data = 3, ack = 4, end = 5 };
std::string to_string(PacketKind kind);

enum class StreamFormat : std::uint8_t { raw = 0, compressed = 1 };

// One over-the-air protocol message. Which fields are meaningful depends on
// the kind; the rest stay at their defaults.
//   REQUEST: format, payload_size, total_bytes, wake_time_ns, device_ids
//   READY:   device_id
//   DATA:    seq, payload (at most 60 bytes)
//   ACK:     seq
//   END:     seq (number of DATA packets), total_bytes
// On the wire every message is kind, fields little-endian, then the CRC-16 of
// everything before it (low byte first).
struct OtaPacket {
    PacketKind kind = PacketKind::data;
    std::uint16_t seq = 0;
    std::vector<std::uint8_t> payload;
    StreamFormat format = StreamFormat::raw;
    std::uint8_t payload_size = kMaxDataPayload;
    std::uint32_t total_bytes = 0;
    std::uint64_t wake_time_ns = 0;
    std::vector<std::uint16_t> device_ids;
    std::uint16_t device_id = 0;

    static OtaPacket request(StreamFormat format, std::uint8_t payload_size, std::uint32_t total_bytes,
                             std::uint64_t wake_time_ns, std::vector<std::uint16_t> device_ids);
    static OtaPacket ready(std::uint16_t device_id);
    static OtaPacket data(std::uint16_t seq, std::vector<std::uint8_t> payload);
    static OtaPacket ack(std::uint16_t seq);
    static OtaPacket end(std::uint16_t n_data, std::uint32_t total_bytes);

    bool operator==(const OtaPacket&) const = default;
};

// Throws std::invalid_argument for a DATA payload over 60 bytes or more than
// 255 REQUEST device ids.
std::vector<std::uint8_t> serialize(const OtaPacket& packet);

// std::nullopt on a CRC mismatch, unknown kind, or a length that does not
// match the kind's layout.
std::optional<OtaPacket> parse(std::span<const std::uint8_t> bytes);

// Serialized size without building the packet.
std::size_t wire_size(PacketKind kind, std::size_t payload_or_ids = 0) noexcept;

}  // namespace iotphy::ota
