#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "iotphy/ota/lz.hpp"
#include "iotphy/ota/packet.hpp"

namespace iotphy::ota {

enum class ImageKind : std::uint8_t { fpga_bitstream = 0, mcu_program = 1 };
std::string to_string(ImageKind kind);

struct FirmwareImage {
    ImageKind kind = ImageKind::fpga_bitstream;
    std::vector<std::uint8_t> data;

    bool operator==(const FirmwareImage&) const = default;
};

struct BlockInfo {
    std::uint16_t raw_size = 0;
    std::uint16_t compressed_size = 0;
    std::uint16_t raw_crc = 0;  // CRC-16 of the decompressed block

    bool operator==(const BlockInfo&) const = default;
};

// Describes how the compressed stream splits back into blocks. Travels as the
// first bytes of the transferred stream:
//   kind u8, raw size u32, block count u16, per block (raw u16, compressed u16,
//   raw CRC-16 u16),
//   CRC-16 of the preceding manifest bytes.
struct Manifest {
    ImageKind kind = ImageKind::fpga_bitstream;
    std::uint32_t raw_size = 0;
    std::vector<BlockInfo> blocks;

    std::size_t serialized_size() const noexcept { return 1 + 4 + 2 + 6 * blocks.size() + 2; }
    std::vector<std::uint8_t> serialize() const;
    // Throws std::invalid_argument on a short buffer, CRC mismatch, or block
    // sizes that do not add up to raw_size.
    static Manifest parse(std::span<const std::uint8_t> bytes);

    bool operator==(const Manifest&) const = default;
};

// Everything the access point sends: the byte stream and its split into DATA
// payloads of payload_size bytes (the last one may be shorter).
struct TransferPlan {
    StreamFormat format = StreamFormat::raw;
    std::vector<std::uint8_t> stream;
    std::size_t payload_size = kMaxDataPayload;
    std::optional<Manifest> manifest;  // set for compressed plans

    std::size_t packet_count() const noexcept;
    std::span<const std::uint8_t> payload(std::size_t seq) const;

    // Sends `bytes` as they are, for sessions sized by a known compressed
    // length rather than by this codec's output.
    static TransferPlan raw(std::vector<std::uint8_t> bytes, std::size_t payload_size = kMaxDataPayload);
};

// Splits into 30 kB blocks, compresses each, and prefixes the manifest.
// Throws std::invalid_argument for an empty image, a payload size outside
// 1..60, or a stream needing more than 65535 packets.
TransferPlan chunk_firmware(const FirmwareImage& image, std::size_t payload_size = kMaxDataPayload);

// Number of 30 kB blocks an image of n bytes splits into.
std::size_t block_count(std::size_t n_bytes) noexcept;

// Node flash: two image slots and a staging area for incoming streams.
class FlashModel {
public:
    static constexpr std::size_t kDefaultCapacity = 8u << 20;
    static constexpr std::size_t kSlotA = 0;
    static constexpr std::size_t kSlotB = 2u << 20;
    static constexpr std::size_t kStaging = 4u << 20;

    struct Write {
        std::size_t address = 0;
        std::size_t length = 0;
    };

    explicit FlashModel(std::size_t capacity = kDefaultCapacity);

    // Throws std::out_of_range outside the capacity.
    void write(std::size_t address, std::span<const std::uint8_t> bytes);
    std::span<const std::uint8_t> read(std::size_t address, std::size_t length) const;

    std::size_t capacity() const noexcept { return contents_.size(); }
    const std::vector<Write>& write_log() const noexcept { return log_; }
    const std::vector<std::uint8_t>& contents() const noexcept { return contents_; }

    // Slot the node boots from, and the length of the image stored there.
    std::size_t boot_slot() const noexcept { return boot_slot_; }
    std::size_t boot_image_size() const noexcept { return boot_size_; }
    std::size_t spare_slot() const noexcept { return boot_slot_ == kSlotA ? kSlotB : kSlotA; }
    void set_boot(std::size_t slot, std::size_t size);
    std::span<const std::uint8_t> boot_image() const { return read(boot_slot_, boot_size_); }

private:
    std::vector<std::uint8_t> contents_;
    std::vector<Write> log_;
    std::size_t boot_slot_ = kSlotA;
    std::size_t boot_size_ = 0;
};

struct ProgramResult {
    bool ok = false;
    FirmwareImage image;
    std::optional<std::size_t> failed_block;
    std::string error;
    // Largest decompression buffer held at once.
    std::size_t peak_decompress_bytes = 0;
};

// Reads the staged stream, rebuilds the image (block by block for compressed
// streams), writes it to the spare slot and switches the boot slot. On any
// failure the boot slot and its image are left untouched.
ProgramResult reassemble_and_program(FlashModel& flash, StreamFormat format, std::size_t stream_size);

}  // namespace iotphy::ota
