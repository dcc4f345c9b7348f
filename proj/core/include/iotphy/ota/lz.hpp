#pragma once

#include <cstddef>
#include <cstdint>
#include <memory_resource>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace iotphy::ota {

// Largest block the codec accepts; the node decompresses one block at a time
// into a buffer of this size.
inline constexpr std::size_t kMaxBlockSize = 30000;

// Byte-oriented LZ77 block format:
//   u16 LE raw length, then sequences of
//   token (high nibble literal count, low nibble match length - 4),
//   literal count extension, literals, u16 LE offset, match length extension.
// A nibble of 15 is followed by extension bytes that add 255 while they read
// 255. The final sequence carries literals only; decoding stops once the raw
// length has been produced.
class DecodeError : public std::runtime_error {
public:
    DecodeError(const std::string& what, std::size_t offset);
    // Offset into the compressed input where decoding failed.
    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

// Throws std::invalid_argument for blocks over kMaxBlockSize.
std::vector<std::uint8_t> compress_block(std::span<const std::uint8_t> block);

// The only allocation is the output buffer, sized exactly to the raw length
// from the header, taken from `memory`.
std::pmr::vector<std::uint8_t> decompress_block(std::span<const std::uint8_t> compressed,
                                                std::pmr::memory_resource* memory);
std::vector<std::uint8_t> decompress_block(std::span<const std::uint8_t> compressed);

// Upper bound on compress_block output for an n-byte block.
std::size_t max_compressed_size(std::size_t n) noexcept;

// Forwards to an upstream resource and records the peak number of bytes
// outstanding.
class PeakCountingResource : public std::pmr::memory_resource {
public:
    explicit PeakCountingResource(std::pmr::memory_resource* upstream = std::pmr::get_default_resource())
        : upstream_(upstream) {}
    std::size_t in_use() const noexcept { return in_use_; }
    std::size_t peak() const noexcept { return peak_; }

private:
    void* do_allocate(std::size_t bytes, std::size_t align) override;
    void do_deallocate(void* p, std::size_t bytes, std::size_t align) override;
    bool do_is_equal(const std::pmr::memory_resource& other) const noexcept override { return this == &other; }

    std::pmr::memory_resource* upstream_;
    std::size_t in_use_ = 0;
    std::size_t peak_ = 0;
};

}  // namespace iotphy::ota
