#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "iotphy/common/bits.hpp"
#include "iotphy/iq/quantize.hpp"

namespace iotphy::iq {

// Layout of one 32-bit serial word, most significant bit first on the wire:
//
//   31..30  I_SYNC      29..17  I_DATA (13b)   16  I_CTRL
//   15..14  Q_SYNC      13..1   Q_DATA (13b)    0  Q_CTRL
struct WordFormat {
    std::uint8_t i_sync = 0b10;
    std::uint8_t q_sync = 0b01;
    bool i_ctrl = false;
    bool q_ctrl = false;
};

inline constexpr std::size_t kWordBits = 32;

struct IqWord {
    std::uint32_t bits = 0;
    friend bool operator==(const IqWord&, const IqWord&) = default;
};

IqWord pack_word(QuantizedSample sample, const WordFormat& fmt = {});
// Control bits are ignored. Does not check sync.
QuantizedSample unpack_word(IqWord word);
bool sync_matches(IqWord word, const WordFormat& fmt = {});

Bits frame_words(std::span<const QuantizedSample> samples, const WordFormat& fmt = {});

struct BitRange {
    std::size_t begin = 0;
    std::size_t end = 0;  // exclusive
    friend bool operator==(const BitRange&, const BitRange&) = default;
};

struct DeframeReport {
    // Bit ranges that did not decode into a word.
    std::vector<BitRange> discarded;
    // Bit offset of every (re)acquired word alignment, in stream order.
    std::vector<std::size_t> lock_offsets;
};

struct DeframeResult {
    std::vector<QuantizedSample> samples;
    DeframeReport report;
};

// Scans for positions where both sync fields match. An alignment is accepted
// when the next word also matches (or the stream has no room for one) and no
// other bit phase within one word period has a longer run of matches. After a
// sync failure the search restarts one bit before the failed boundary.
DeframeResult deframe_words(std::span<const std::uint8_t> bits, const WordFormat& fmt = {});

Bits words_to_bits(std::span<const IqWord> words);
// Leftover bits that do not fill a word are dropped.
std::vector<IqWord> bits_to_words(std::span<const std::uint8_t> bits);

// Big-endian 32-bit words.
void write_word_file(const std::filesystem::path& path, std::span<const IqWord> words);
std::vector<IqWord> read_word_file(const std::filesystem::path& path);

}  // namespace iotphy::iq
