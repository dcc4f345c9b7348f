#include <stdexcept>
#include <doctest.h>

#include "iotphy/common/bits.hpp"
#include "oracles/gen.hpp"

using namespace iotphy;

TEST_CASE("byte/bit conversion orders") {
    const std::vector<std::uint8_t> b{0xAA};
    CHECK(bytes_to_bits_lsb_first(b) == Bits{0, 1, 0, 1, 0, 1, 0, 1});
    CHECK(bytes_to_bits_msb_first(b) == Bits{1, 0, 1, 0, 1, 0, 1, 0});
    CHECK(bits_to_bytes_lsb_first(Bits{1, 0, 0, 0, 0, 0, 0, 0, 1}) == std::vector<std::uint8_t>{0x01});
}

TEST_CASE("bit conversion roundtrips on random bytes") {
    oracle::Gen g(11);
    for (int t = 0; t < 200; ++t) {
        const auto bytes = g.bytes(g.size(0, 64));
        CHECK(bits_to_bytes_lsb_first(bytes_to_bits_lsb_first(bytes)) == bytes);
        CHECK(bits_to_bytes_msb_first(bytes_to_bits_msb_first(bytes)) == bytes);
    }
}

TEST_CASE("hex parsing") {
    CHECK(parse_hex("0xDEad:be-ef 01") == std::vector<std::uint8_t>{0xde, 0xad, 0xbe, 0xef, 0x01});
    CHECK(parse_hex("").empty());
    CHECK(to_hex(parse_hex("00ff10")) == "00ff10");
    CHECK_THROWS_AS(parse_hex("abc"), std::invalid_argument);
    CHECK_THROWS_AS(parse_hex("zz"), std::invalid_argument);
}

TEST_CASE("reverse_bits8") {
    CHECK(reverse_bits8(0x01) == 0x80);
    CHECK(reverse_bits8(0xF0) == 0x0F);
    for (int v = 0; v < 256; ++v) CHECK(reverse_bits8(reverse_bits8(static_cast<std::uint8_t>(v))) == v);
}
