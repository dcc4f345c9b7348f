#include "iotphy/ble/packet.hpp"

#include <algorithm>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace iotphy::ble {

std::uint32_t crc24(std::span<const std::uint8_t> bytes, std::uint32_t init) {
    std::uint32_t reg = init & 0xFFFFFF;
    for (const std::uint8_t byte : bytes) {
        for (int i = 0; i < 8; ++i) {
            const std::uint32_t fb = ((reg >> 23) ^ (byte >> i)) & 1U;
            reg = (reg << 1) & 0xFFFFFF;
            if (fb != 0) reg ^= kCrcPoly;
        }
    }
    return reg;
}

std::array<std::uint8_t, 3> crc24_bytes(std::uint32_t crc) {
    return {reverse_bits8(static_cast<std::uint8_t>(crc >> 16)),
            reverse_bits8(static_cast<std::uint8_t>(crc >> 8)),
            reverse_bits8(static_cast<std::uint8_t>(crc))};
}

std::uint32_t crc24_from_bytes(std::span<const std::uint8_t, 3> bytes) {
    return (std::uint32_t{reverse_bits8(bytes[0])} << 16) | (std::uint32_t{reverse_bits8(bytes[1])} << 8) |
           reverse_bits8(bytes[2]);
}

namespace {

void check_channel(int channel) {
    if (channel < 0 || channel > kMaxChannel) {
        throw std::invalid_argument("BLE channel must be 0..39, got " + std::to_string(channel));
    }
}

}  // namespace

Whitener::Whitener(int channel) : state_(0) {
    check_channel(channel);
    state_ = static_cast<std::uint8_t>(channel & 0x7F);
}

std::uint8_t Whitener::next_bit() noexcept {
    const auto out = static_cast<std::uint8_t>((state_ >> 6) & 1U);
    state_ = static_cast<std::uint8_t>(((state_ << 1) & 0x7F) ^ (out != 0 ? 0x11 : 0x00));
    return out;
}

std::uint8_t Whitener::next_byte() noexcept {
    std::uint8_t b = 0;
    for (int i = 0; i < 8; ++i) b = static_cast<std::uint8_t>(b | (next_bit() << i));
    return b;
}

std::vector<std::uint8_t> whiten(std::span<const std::uint8_t> bytes, int channel) {
    Whitener w(channel);
    std::vector<std::uint8_t> out(bytes.begin(), bytes.end());
    for (auto& b : out) b ^= w.next_byte();
    return out;
}

void BleAdvPdu::validate() const {
    if (pdu_type > 0xF) throw std::invalid_argument("pdu_type must fit in 4 bits");
    if (flags > 0xF) throw std::invalid_argument("flags must fit in 4 bits");
    if (adv_data.size() > kMaxAdvData) {
        throw std::invalid_argument("adv_data holds at most 31 bytes, got " + std::to_string(adv_data.size()));
    }
}

std::vector<std::uint8_t> BleAdvPdu::to_bytes() const {
    validate();
    std::vector<std::uint8_t> out;
    out.reserve(2 + length());
    out.push_back(static_cast<std::uint8_t>(pdu_type | (flags << 4)));
    out.push_back(static_cast<std::uint8_t>(length()));
    out.insert(out.end(), adv_address.begin(), adv_address.end());
    out.insert(out.end(), adv_data.begin(), adv_data.end());
    return out;
}

BleAdvPdu BleAdvPdu::from_bytes(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < 8) throw std::invalid_argument("PDU shorter than header plus address");
    const std::size_t len = bytes[1];
    if (len < 6 || len > 6 + kMaxAdvData || bytes.size() != 2 + len) {
        throw std::invalid_argument("PDU length field inconsistent with its size");
    }
    BleAdvPdu pdu;
    pdu.pdu_type = bytes[0] & 0x0F;
    pdu.flags = static_cast<std::uint8_t>(bytes[0] >> 4);
    std::copy_n(bytes.begin() + 2, 6, pdu.adv_address.begin());
    pdu.adv_data.assign(bytes.begin() + 8, bytes.end());
    return pdu;
}

bool is_advertising_channel(int channel) noexcept { return channel >= 37 && channel <= 39; }

std::vector<std::uint8_t> BleAdvPacket::whitened_bytes() const {
    auto body = pdu.to_bytes();
    const auto c = crc24_bytes(crc);
    body.insert(body.end(), c.begin(), c.end());
    return whiten(body, channel);
}

std::vector<std::uint8_t> BleAdvPacket::air_bytes() const {
    std::vector<std::uint8_t> out{kPreamble};
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(kAccessAddress >> (8 * i)));
    const auto body = whitened_bytes();
    out.insert(out.end(), body.begin(), body.end());
    return out;
}

Bits BleAdvPacket::to_bits() const { return bytes_to_bits_lsb_first(air_bytes()); }

BleAdvPacket make_packet(const BleAdvPdu& pdu, int channel) {
    if (!is_advertising_channel(channel)) {
        throw std::invalid_argument("advertising channel must be 37, 38 or 39, got " + std::to_string(channel));
    }
    return {pdu, crc24(pdu.to_bytes()), channel};
}

Bits assemble_packet(const BleAdvPdu& pdu, int channel) { return make_packet(pdu, channel).to_bits(); }

std::optional<BleAdvPdu> deassemble_packet(std::span<const std::uint8_t> bits, int channel) {
    if (!is_advertising_channel(channel) || bits.size() % 8 != 0) return std::nullopt;
    const auto bytes = bits_to_bytes_lsb_first(bits);
    // preamble + access address + header + address + crc
    if (bytes.size() < 5 + 8 + 3 || bytes[0] != kPreamble) return std::nullopt;
    for (int i = 0; i < 4; ++i) {
        if (bytes[1 + i] != static_cast<std::uint8_t>(kAccessAddress >> (8 * i))) return std::nullopt;
    }
    const auto body = whiten(std::span(bytes).subspan(5), channel);
    const std::size_t pdu_len = body.size() - 3;
    if (body[1] + 2U != pdu_len) return std::nullopt;
    const auto pdu_bytes = std::span(body).first(pdu_len);
    if (crc24(pdu_bytes) != crc24_from_bytes(std::span<const std::uint8_t>(body).last<3>())) return std::nullopt;
    try {
        return BleAdvPdu::from_bytes(pdu_bytes);
    } catch (const std::invalid_argument&) {
        return std::nullopt;
    }
}

BeaconRequest beacon_request_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw std::invalid_argument("beacon description must be a JSON object");
    for (const auto& [key, value] : j.items()) {
        if (key != "adv_address" && key != "adv_data" && key != "channel") {
            throw std::invalid_argument("unknown beacon field '" + key + "'");
        }
    }
    BeaconRequest r;
    const auto addr = parse_hex(j.at("adv_address").get<std::string>());
    if (addr.size() != 6) throw std::invalid_argument("adv_address must be 6 bytes");
    std::copy(addr.begin(), addr.end(), r.pdu.adv_address.begin());
    if (j.contains("adv_data")) r.pdu.adv_data = parse_hex(j.at("adv_data").get<std::string>());
    if (j.contains("channel")) r.channel = j.at("channel").get<int>();
    r.pdu.validate();
    if (!is_advertising_channel(r.channel)) {
        throw std::invalid_argument("advertising channel must be 37, 38 or 39, got " + std::to_string(r.channel));
    }
    return r;
}

}  // namespace iotphy::ble
