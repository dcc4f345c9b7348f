#include "iotphy/ota/packet.hpp"

#include <stdexcept>

namespace iotphy::ota {

std::uint16_t crc16_ccitt(std::span<const std::uint8_t> bytes, std::uint16_t init) noexcept {
    std::uint16_t crc = init;
    for (const std::uint8_t b : bytes) {
        crc = static_cast<std::uint16_t>(crc ^ (b << 8));
        for (int i = 0; i < 8; ++i) {
            crc = static_cast<std::uint16_t>((crc & 0x8000) != 0 ? (crc << 1) ^ 0x1021 : crc << 1);
        }
    }
    return crc;
}

std::string to_string(PacketKind kind) {
    switch (kind) {
        case PacketKind::request: return "REQUEST";
        case PacketKind::ready: return "READY";
        case PacketKind::data: return "DATA";
        case PacketKind::ack: return "ACK";
        case PacketKind::end: return "END";
    }
    return "UNKNOWN";
}

OtaPacket OtaPacket::request(StreamFormat format, std::uint8_t payload_size, std::uint32_t total_bytes,
                             std::uint64_t wake_time_ns, std::vector<std::uint16_t> device_ids) {
    OtaPacket p;
    p.kind = PacketKind::request;
    p.format = format;
    p.payload_size = payload_size;
    p.total_bytes = total_bytes;
    p.wake_time_ns = wake_time_ns;
    p.device_ids = std::move(device_ids);
    return p;
}

OtaPacket OtaPacket::ready(std::uint16_t device_id) {
    OtaPacket p;
    p.kind = PacketKind::ready;
    p.device_id = device_id;
    return p;
}

OtaPacket OtaPacket::data(std::uint16_t seq, std::vector<std::uint8_t> payload) {
    OtaPacket p;
    p.kind = PacketKind::data;
    p.seq = seq;
    p.payload = std::move(payload);
    return p;
}

OtaPacket OtaPacket::ack(std::uint16_t seq) {
    OtaPacket p;
    p.kind = PacketKind::ack;
    p.seq = seq;
    return p;
}

OtaPacket OtaPacket::end(std::uint16_t n_data, std::uint32_t total_bytes) {
    OtaPacket p;
    p.kind = PacketKind::end;
    p.seq = n_data;
    p.total_bytes = total_bytes;
    return p;
}

namespace {

void put(std::vector<std::uint8_t>& out, std::uint64_t v, int bytes) {
    for (int i = 0; i < bytes; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint64_t get(std::span<const std::uint8_t> in, std::size_t at, int bytes) {
    std::uint64_t v = 0;
    for (int i = 0; i < bytes; ++i) v |= std::uint64_t{in[at + static_cast<std::size_t>(i)]} << (8 * i);
    return v;
}

}  // namespace

std::size_t wire_size(PacketKind kind, std::size_t n) noexcept {
    switch (kind) {
        case PacketKind::request: return 1 + 1 + 1 + 4 + 8 + 1 + 2 * n + 2;
        case PacketKind::ready: return 1 + 2 + 2;
        case PacketKind::data: return 1 + 2 + n + 2;
        case PacketKind::ack: return 1 + 2 + 2;
        case PacketKind::end: return 1 + 2 + 4 + 2;
    }
    return 0;
}

std::vector<std::uint8_t> serialize(const OtaPacket& p) {
    std::vector<std::uint8_t> out;
    out.push_back(static_cast<std::uint8_t>(p.kind));
    switch (p.kind) {
        case PacketKind::request:
            if (p.device_ids.size() > 255) throw std::invalid_argument("REQUEST carries at most 255 device ids");
            put(out, static_cast<std::uint8_t>(p.format), 1);
            put(out, p.payload_size, 1);
            put(out, p.total_bytes, 4);
            put(out, p.wake_time_ns, 8);
            put(out, p.device_ids.size(), 1);
            for (const auto id : p.device_ids) put(out, id, 2);
            break;
        case PacketKind::ready:
            put(out, p.device_id, 2);
            break;
        case PacketKind::data:
            if (p.payload.size() > kMaxDataPayload) {
                throw std::invalid_argument("DATA payload of " + std::to_string(p.payload.size()) +
                                            " bytes exceeds 60");
            }
            put(out, p.seq, 2);
            out.insert(out.end(), p.payload.begin(), p.payload.end());
            break;
        case PacketKind::ack:
            put(out, p.seq, 2);
            break;
        case PacketKind::end:
            put(out, p.seq, 2);
            put(out, p.total_bytes, 4);
            break;
    }
    put(out, crc16_ccitt(out), 2);
    return out;
}

std::optional<OtaPacket> parse(std::span<const std::uint8_t> in) {
    if (in.size() < 3) return std::nullopt;
    const std::size_t body = in.size() - 2;
    if (crc16_ccitt(in.first(body)) != get(in, body, 2)) return std::nullopt;
    if (in[0] < 1 || in[0] > 5) return std::nullopt;

    OtaPacket p;
    p.kind = static_cast<PacketKind>(in[0]);
    switch (p.kind) {
        case PacketKind::request: {
            if (body < wire_size(PacketKind::request) - 2) return std::nullopt;
            const std::size_t n = in[15];
            if (in.size() != wire_size(PacketKind::request, n) || in[1] > 1) return std::nullopt;
            p.format = static_cast<StreamFormat>(in[1]);
            p.payload_size = in[2];
            p.total_bytes = static_cast<std::uint32_t>(get(in, 3, 4));
            p.wake_time_ns = get(in, 7, 8);
            for (std::size_t i = 0; i < n; ++i) p.device_ids.push_back(static_cast<std::uint16_t>(get(in, 16 + 2 * i, 2)));
            break;
        }
        case PacketKind::ready:
            if (in.size() != wire_size(p.kind)) return std::nullopt;
            p.device_id = static_cast<std::uint16_t>(get(in, 1, 2));
            break;
        case PacketKind::data:
            if (in.size() < wire_size(p.kind) || in.size() > wire_size(p.kind, kMaxDataPayload)) return std::nullopt;
            p.seq = static_cast<std::uint16_t>(get(in, 1, 2));
            p.payload.assign(in.begin() + 3, in.begin() + static_cast<std::ptrdiff_t>(body));
            break;
        case PacketKind::ack:
            if (in.size() != wire_size(p.kind)) return std::nullopt;
            p.seq = static_cast<std::uint16_t>(get(in, 1, 2));
            break;
        case PacketKind::end:
            if (in.size() != wire_size(p.kind)) return std::nullopt;
            p.seq = static_cast<std::uint16_t>(get(in, 1, 2));
            p.total_bytes = static_cast<std::uint32_t>(get(in, 3, 4));
            break;
    }
    return p;
}

}  // namespace iotphy::ota
