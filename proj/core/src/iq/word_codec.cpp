#include "iotphy/iq/word_codec.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>

namespace iotphy::iq {

namespace {

constexpr std::uint32_t kDataMask = 0x1FFF;

std::int16_t sign_extend13(std::uint32_t v) {
    v &= kDataMask;
    return static_cast<std::int16_t>((v & 0x1000U) ? static_cast<int>(v) - 0x2000 : static_cast<int>(v));
}

std::uint32_t read_word_at(std::span<const std::uint8_t> bits, std::size_t pos) {
    std::uint32_t w = 0;
    for (std::size_t k = 0; k < kWordBits; ++k) {
        w = (w << 1) | (bits[pos + k] & 1U);
    }
    return w;
}

bool word_ok_at(std::span<const std::uint8_t> bits, std::size_t pos, const WordFormat& fmt) {
    return pos + kWordBits <= bits.size() && sync_matches(IqWord{read_word_at(bits, pos)}, fmt);
}

// Consecutive words with matching sync starting at pos, up to `cap`.
// Random data passes both 2-bit sync checks one time in 16, so a single
// confirming word is not enough to tell a chance match from the real phase;
// candidates are compared by their run of valid words instead. A slip moves the
// word boundary by one bit, and the words it straddles may be broken, so the
// phases one bit either side of the expected boundary are tried first, over
// their first few slots. The expected boundary itself is kept while its own run
// is confirmed and the rival phase only takes over where that run ends. When
// neither is confirmed, every phase of one word period after the first match is
// scored the same way. Any lock must be backed by a second word when the stream
// has room for one.
constexpr std::size_t kRunCap = 8;
constexpr std::size_t kSlots = 4;

struct Candidate {
    std::size_t at = 0;
    std::size_t run = 0;
};

class AlignmentSearch {
public:
    AlignmentSearch(std::span<const std::uint8_t> bits, const WordFormat& fmt) : bits_(bits), fmt_(fmt) {}

    std::size_t find(std::size_t from, std::size_t expected) const {
        const std::size_t n = bits_.size();
        if (expected + kWordBits <= n) {
            Candidate best;
            for (std::size_t slot = 0; slot < kSlots; ++slot) {
                for (const std::size_t p : {expected + slot * kWordBits - 1, expected + slot * kWordBits + 1}) {
                    // p + 1 so that expected - 1 wraps to zero and is skipped.
                    if (p + 1 > from) {
                        consider(best, p);
                    }
                }
            }
            const std::size_t own = run(expected);
            if (confirmed(expected, own) && (best.run == 0 || best.at + 1 >= expected + own * kWordBits)) {
                return expected;
            }
            if (best.run > 0 && confirmed(best.at, best.run)) {
                return best.at;
            }
        }
        for (std::size_t q0 = from; q0 + kWordBits <= n; ++q0) {
            if (!ok(q0)) {
                continue;
            }
            Candidate best;
            for (std::size_t q = q0; q < q0 + kWordBits; ++q) {
                for (std::size_t slot = 0; slot < kSlots; ++slot) {
                    consider(best, q + slot * kWordBits);
                }
            }
            if (confirmed(best.at, best.run)) {
                return best.at;
            }
        }
        return n;
    }

private:
    bool ok(std::size_t pos) const { return word_ok_at(bits_, pos, fmt_); }

    std::size_t run(std::size_t pos) const {
        std::size_t r = 0;
        while (r < kRunCap && ok(pos + r * kWordBits)) {
            ++r;
        }
        return r;
    }

    bool confirmed(std::size_t pos, std::size_t r) const {
        return r > 0 && r >= std::min<std::size_t>(2, (bits_.size() - pos) / kWordBits);
    }

    // Longer runs win; equal runs keep the earlier position.
    void consider(Candidate& best, std::size_t pos) const {
        if (pos + kWordBits > bits_.size()) {
            return;
        }
        const std::size_t r = run(pos);
        if (r > best.run || (r == best.run && r > 0 && pos < best.at)) {
            best = {pos, r};
        }
    }

    std::span<const std::uint8_t> bits_;
    const WordFormat& fmt_;
};

}  // namespace

IqWord pack_word(QuantizedSample s, const WordFormat& fmt) {
    std::uint32_t w = 0;
    w |= static_cast<std::uint32_t>(fmt.i_sync & 0x3U) << 30;
    w |= (static_cast<std::uint32_t>(s.i_q13) & kDataMask) << 17;
    w |= static_cast<std::uint32_t>(fmt.i_ctrl ? 1U : 0U) << 16;
    w |= static_cast<std::uint32_t>(fmt.q_sync & 0x3U) << 14;
    w |= (static_cast<std::uint32_t>(s.q_q13) & kDataMask) << 1;
    w |= fmt.q_ctrl ? 1U : 0U;
    return IqWord{w};
}

QuantizedSample unpack_word(IqWord word) {
    return {sign_extend13(word.bits >> 17), sign_extend13(word.bits >> 1)};
}

bool sync_matches(IqWord word, const WordFormat& fmt) {
    return ((word.bits >> 30) & 0x3U) == (fmt.i_sync & 0x3U) &&
           ((word.bits >> 14) & 0x3U) == (fmt.q_sync & 0x3U);
}

Bits frame_words(std::span<const QuantizedSample> samples, const WordFormat& fmt) {
    std::vector<IqWord> words;
    words.reserve(samples.size());
    for (const auto& s : samples) {
        words.push_back(pack_word(s, fmt));
    }
    return words_to_bits(words);
}

DeframeResult deframe_words(std::span<const std::uint8_t> bits, const WordFormat& fmt) {
    DeframeResult result;
    const AlignmentSearch search(bits, fmt);
    auto& report = result.report;
    const std::size_t n = bits.size();

    std::size_t pos = 0;
    std::size_t search_from = 0;
    std::size_t discard_start = 0;
    bool locked = false;

    while (true) {
        if (!locked) {
            const std::size_t q = search.find(search_from, discard_start);
            if (q >= n) {
                if (discard_start < n) {
                    report.discarded.push_back({discard_start, n});
                }
                break;
            }
            if (q > discard_start) {
                report.discarded.push_back({discard_start, q});
            }
            report.lock_offsets.push_back(q);
            pos = q;
            locked = true;
        }
        if (pos + kWordBits > n) {
            if (pos < n) {
                report.discarded.push_back({pos, n});
            }
            break;
        }
        const IqWord w{read_word_at(bits, pos)};
        if (sync_matches(w, fmt)) {
            result.samples.push_back(unpack_word(w));
            pos += kWordBits;
            continue;
        }
        locked = false;
        discard_start = pos;
        search_from = pos > 0 ? pos - 1 : 0;
    }
    return result;
}

Bits words_to_bits(std::span<const IqWord> words) {
    Bits bits;
    bits.reserve(words.size() * kWordBits);
    for (const auto& w : words) {
        for (int k = 31; k >= 0; --k) {
            bits.push_back(static_cast<std::uint8_t>((w.bits >> k) & 1U));
        }
    }
    return bits;
}

std::vector<IqWord> bits_to_words(std::span<const std::uint8_t> bits) {
    std::vector<IqWord> words;
    words.reserve(bits.size() / kWordBits);
    for (std::size_t pos = 0; pos + kWordBits <= bits.size(); pos += kWordBits) {
        words.push_back(IqWord{read_word_at(bits, pos)});
    }
    return words;
}

void write_word_file(const std::filesystem::path& path, std::span<const IqWord> words) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw std::runtime_error("cannot open word file for writing: " + path.string());
    }
    for (const auto& w : words) {
        const char bytes[4] = {static_cast<char>(w.bits >> 24), static_cast<char>(w.bits >> 16),
                               static_cast<char>(w.bits >> 8), static_cast<char>(w.bits)};
        out.write(bytes, 4);
    }
    if (!out) {
        throw std::runtime_error("failed writing word file: " + path.string());
    }
}

std::vector<IqWord> read_word_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open word file: " + path.string());
    }
    std::vector<char> raw((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (raw.size() % 4 != 0) {
        throw std::runtime_error("word file size is not a multiple of 4 bytes: " + path.string());
    }
    std::vector<IqWord> words(raw.size() / 4);
    for (std::size_t k = 0; k < words.size(); ++k) {
        const auto* b = reinterpret_cast<const unsigned char*>(raw.data() + 4 * k);
        words[k].bits = (std::uint32_t{b[0]} << 24) | (std::uint32_t{b[1]} << 16) |
                        (std::uint32_t{b[2]} << 8) | std::uint32_t{b[3]};
    }
    return words;
}

}  // namespace iotphy::iq
