#include "iotphy/common/bits.hpp"

#include <stdexcept>

namespace iotphy {

Bits bytes_to_bits_lsb_first(std::span<const std::uint8_t> bytes) {
    Bits bits;
    bits.reserve(bytes.size() * 8);
    for (std::uint8_t byte : bytes) {
        for (int i = 0; i < 8; ++i) {
            bits.push_back(static_cast<std::uint8_t>((byte >> i) & 1U));
        }
    }
    return bits;
}

Bits bytes_to_bits_msb_first(std::span<const std::uint8_t> bytes) {
    Bits bits;
    bits.reserve(bytes.size() * 8);
    for (std::uint8_t byte : bytes) {
        for (int i = 7; i >= 0; --i) {
            bits.push_back(static_cast<std::uint8_t>((byte >> i) & 1U));
        }
    }
    return bits;
}

std::vector<std::uint8_t> bits_to_bytes_lsb_first(std::span<const std::uint8_t> bits) {
    std::vector<std::uint8_t> bytes(bits.size() / 8, 0);
    for (std::size_t i = 0; i < bytes.size() * 8; ++i) {
        if (bits[i] != 0) {
            bytes[i / 8] |= static_cast<std::uint8_t>(1U << (i % 8));
        }
    }
    return bytes;
}

std::vector<std::uint8_t> bits_to_bytes_msb_first(std::span<const std::uint8_t> bits) {
    std::vector<std::uint8_t> bytes(bits.size() / 8, 0);
    for (std::size_t i = 0; i < bytes.size() * 8; ++i) {
        if (bits[i] != 0) {
            bytes[i / 8] |= static_cast<std::uint8_t>(0x80U >> (i % 8));
        }
    }
    return bytes;
}

namespace {

int hex_digit(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

}  // namespace

std::vector<std::uint8_t> parse_hex(std::string_view text) {
    if (text.size() >= 2 && text[0] == '0' && (text[1] == 'x' || text[1] == 'X')) {
        text.remove_prefix(2);
    }
    std::vector<std::uint8_t> out;
    int pending = -1;
    for (char c : text) {
        if (c == ':' || c == ' ' || c == '-') {
            continue;
        }
        const int d = hex_digit(c);
        if (d < 0) {
            throw std::invalid_argument(std::string("invalid hex character '") + c + "'");
        }
        if (pending < 0) {
            pending = d;
        } else {
            out.push_back(static_cast<std::uint8_t>((pending << 4) | d));
            pending = -1;
        }
    }
    if (pending >= 0) {
        throw std::invalid_argument("hex string has an odd number of digits");
    }
    return out;
}

std::string to_hex(std::span<const std::uint8_t> bytes) {
    static constexpr char kDigits[] = "0123456789abcdef";
    std::string s;
    s.reserve(bytes.size() * 2);
    for (std::uint8_t b : bytes) {
        s.push_back(kDigits[b >> 4]);
        s.push_back(kDigits[b & 0x0F]);
    }
    return s;
}

std::uint8_t reverse_bits8(std::uint8_t value) {
    std::uint8_t r = 0;
    for (int i = 0; i < 8; ++i) {
        r = static_cast<std::uint8_t>((r << 1) | ((value >> i) & 1U));
    }
    return r;
}

}  // namespace iotphy
