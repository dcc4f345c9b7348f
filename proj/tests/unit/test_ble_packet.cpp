#include <stdexcept>
#include <doctest.h>

#include <set>

#include <nlohmann/json.hpp>

#include "iotphy/ble/packet.hpp"
#include "oracles/ble_oracle.hpp"
#include "oracles/gen.hpp"

using namespace iotphy;
using namespace iotphy::ble;

namespace {

BleAdvPdu random_pdu(oracle::Gen& g) {
    BleAdvPdu p;
    p.pdu_type = static_cast<std::uint8_t>(g.integer(0, 15));
    p.flags = static_cast<std::uint8_t>(g.integer(0, 15));
    for (auto& b : p.adv_address) b = static_cast<std::uint8_t>(g.u64());
    p.adv_data = g.bytes(g.size(0, kMaxAdvData));
    return p;
}

}  // namespace

TEST_CASE("CRC examples") {
    CHECK(crc24({}) == 0x555555);
    const std::vector<std::uint8_t> zero{0x00};
    // Frozen from the bit-array oracle.
    CHECK(oracle::crc24_bitwise(zero) == 0x54b947);
    CHECK(crc24(zero) == 0x54b947);
}

TEST_CASE("property: CRC register matches the bit-level oracle") {
    oracle::Gen g(100);
    for (int t = 0; t < 1000; ++t) {
        const auto bytes = random_pdu(g).to_bytes();
        CHECK(crc24(bytes) == oracle::crc24_bitwise(bytes));
    }
}

TEST_CASE("property: single bit flips change the CRC") {
    oracle::Gen g(101);
    for (int t = 0; t < 1000; ++t) {
        auto bytes = g.bytes(g.size(1, 39));
        const auto before = crc24(bytes);
        bytes[g.size(0, bytes.size() - 1)] ^= static_cast<std::uint8_t>(1U << g.integer(0, 7));
        CHECK(crc24(bytes) != before);
    }
}

TEST_CASE("CRC byte order roundtrip") {
    const auto b = crc24_bytes(0x123456);
    CHECK(b[0] == reverse_bits8(0x12));
    CHECK(b[2] == reverse_bits8(0x56));
    CHECK(crc24_from_bytes(b) == 0x123456);
}

TEST_CASE("whitening keystream") {
    const std::vector<std::uint8_t> zeros{0, 0};
    CHECK(whiten(zeros, 37) == std::vector<std::uint8_t>{0x42, 0x7B});
    const std::vector<std::uint8_t> z64(64, 0);
    CHECK(whiten(z64, 37) == oracle::whiten_bitwise(z64, 37));
    CHECK(whiten(z64, 37) != whiten(z64, 38));
    CHECK_THROWS_AS(whiten(zeros, 40), std::invalid_argument);
    CHECK_THROWS_AS(whiten(zeros, -1), std::invalid_argument);
}

TEST_CASE("keystream period is 127 for every non-zero seed") {
    for (int ch = 1; ch <= kMaxChannel; ++ch) {
        Whitener w(ch);
        const auto start = w.state();
        int period = 0;
        do {
            w.next_bit();
            ++period;
        } while (w.state() != start && period < 200);
        CHECK(period == 127);
    }
}

TEST_CASE("property: whitening is an involution and matches the oracle") {
    oracle::Gen g(102);
    for (int ch = 0; ch <= kMaxChannel; ++ch) {
        for (int t = 0; t < 25; ++t) {
            const auto x = g.bytes(g.size(0, 40));
            const auto w = whiten(x, ch);
            CHECK(whiten(w, ch) == x);
            CHECK(w == oracle::whiten_bitwise(x, ch));
        }
    }
}

TEST_CASE("PDU bytes and validation") {
    BleAdvPdu p;
    p.adv_address = {1, 2, 3, 4, 5, 6};
    p.adv_data = {0xAA};
    p.flags = 0x4;
    const auto b = p.to_bytes();
    CHECK(b == std::vector<std::uint8_t>{0x42, 7, 1, 2, 3, 4, 5, 6, 0xAA});
    CHECK(BleAdvPdu::from_bytes(b) == p);

    p.adv_data.assign(32, 0);
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p.adv_data.clear();
    p.pdu_type = 16;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    const std::vector<std::uint8_t> short_len{0x02, 9, 1, 2, 3, 4, 5, 6};
    CHECK_THROWS(BleAdvPdu::from_bytes(short_len));
}

TEST_CASE("fixed air fields") {
    BleAdvPdu p;
    const auto bits = assemble_packet(p, 37);
    CHECK(Bits(bits.begin(), bits.begin() + 8) == Bits{0, 1, 0, 1, 0, 1, 0, 1});
    const std::vector<std::uint8_t> aa{0xD6, 0xBE, 0x89, 0x8E};
    const auto aa_bits = bytes_to_bits_lsb_first(aa);
    CHECK(Bits(bits.begin() + 8, bits.begin() + 40) == aa_bits);
    CHECK(bits.size() == 8 * (1 + 4 + 2 + 6 + 3));
    CHECK_THROWS_AS(make_packet(p, 12), std::invalid_argument);
}

TEST_CASE("beacon example") {
    const auto req = beacon_request_from_json(
        nlohmann::json::parse(R"({"adv_address": "c0ffee123456", "adv_data": "0201060303aafe", "channel": 37})"));
    const auto pkt = make_packet(req.pdu, req.channel);
    CHECK(pkt.crc == 0x2845f2);
    CHECK(to_hex(pkt.air_bytes()) == "aad6be898e40768e328ef95674922de9f3c4272c430372");
    CHECK_THROWS(beacon_request_from_json(nlohmann::json::parse(R"({"adv_address": "c0ffee", "channel": 37})")));
    CHECK_THROWS(beacon_request_from_json(nlohmann::json::parse(R"({"adv_address": "c0ffee123456", "tx_power": 1})")));
}

TEST_CASE("property: assemble then deassemble returns the PDU") {
    oracle::Gen g(103);
    for (int t = 0; t < 300; ++t) {
        const auto p = random_pdu(g);
        const int ch = g.integer(37, 39);
        auto bits = assemble_packet(p, ch);
        // Check against the oracles rather than the production CRC.
        const auto body = p.to_bytes();
        const auto pkt = make_packet(p, ch);
        CHECK(pkt.crc == oracle::crc24_bitwise(body));
        auto clear = oracle::whiten_bitwise(pkt.whitened_bytes(), ch);
        CHECK(std::vector<std::uint8_t>(clear.begin(), clear.end() - 3) == body);

        const auto back = deassemble_packet(bits, ch);
        REQUIRE(back.has_value());
        CHECK(*back == p);
        // Corruption is caught by the CRC.
        bits[40 + g.size(0, bits.size() - 41)] ^= 1;
        CHECK_FALSE(deassemble_packet(bits, ch).has_value());
    }
}

TEST_CASE("advertising channels") {
    std::set<int> adv;
    for (int c = -1; c <= 40; ++c)
        if (is_advertising_channel(c)) adv.insert(c);
    CHECK(adv == std::set<int>{37, 38, 39});
}
