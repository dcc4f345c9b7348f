#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace iotphy {

// One element per bit, each 0 or 1, in transmission order.
using Bits = std::vector<std::uint8_t>;

Bits bytes_to_bits_lsb_first(std::span<const std::uint8_t> bytes);
Bits bytes_to_bits_msb_first(std::span<const std::uint8_t> bytes);

// Trailing bits that do not fill a whole byte are dropped.
std::vector<std::uint8_t> bits_to_bytes_lsb_first(std::span<const std::uint8_t> bits);
std::vector<std::uint8_t> bits_to_bytes_msb_first(std::span<const std::uint8_t> bits);

// Accepts upper/lower case, optional "0x" prefix, and ignores ':' ' ' '-'
// separators. Throws std::invalid_argument on odd digit count or bad chars.
std::vector<std::uint8_t> parse_hex(std::string_view text);
std::string to_hex(std::span<const std::uint8_t> bytes);

std::uint8_t reverse_bits8(std::uint8_t value);

}  // namespace iotphy
